#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "sentiscore/error.hpp"
#include "sentiscore/tensor.hpp"
#include "sentiscore/text.hpp"

namespace sentiscore {

// Hand-written forward/backward passes for every layer of the classifier.
// All math is double precision and every accumulation order is fixed, so
// results are reproducible bit for bit.

enum class BatchNormMode { train, infer };

struct BatchNormState {
  Tensor gamma;
  Tensor beta;
  Tensor running_mean;
  Tensor running_var;
  double momentum = 0.1;
  double epsilon = 1e-5;

  static BatchNormState create(std::size_t features, double momentum,
                               double epsilon) {
    BatchNormState s;
    s.gamma = Tensor::zeros({features});
    s.gamma.fill(1.0);
    s.beta = Tensor::zeros({features});
    s.running_mean = Tensor::zeros({features});
    s.running_var = Tensor::zeros({features});
    s.running_var.fill(1.0);
    s.momentum = momentum;
    s.epsilon = epsilon;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Embedding lookup.

// Rows of the table gathered by index; pad rows come from the (trainable)
// pad embedding like any other.
inline Tensor embedding_lookup(const Tensor& table, const EncodedDoc& doc) {
  const std::size_t vocab_size = table.dim(0);
  const std::size_t dim = table.dim(1);
  Tensor out = Tensor::zeros({doc.length(), dim});
  for (std::size_t i = 0; i < doc.length(); ++i) {
    const std::uint32_t index = doc.indices[i];
    if (index >= vocab_size) {
      throw RangeError("embedding index " + std::to_string(index) +
                       " out of bounds for vocabulary of " +
                       std::to_string(vocab_size));
    }
    const double* src = table.row(index);
    double* dst = out.row(i);
    for (std::size_t d = 0; d < dim; ++d) dst[d] = src[d];
  }
  return out;
}

// Accumulates once per occurrence of each index.
inline void embedding_backward(const EncodedDoc& doc, const Tensor& d_out,
                               Tensor& d_table) {
  const std::size_t dim = d_table.dim(1);
  for (std::size_t i = 0; i < doc.length(); ++i) {
    const double* src = d_out.row(i);
    double* dst = d_table.row(doc.indices[i]);
    for (std::size_t d = 0; d < dim; ++d) dst[d] += src[d];
  }
}

// ---------------------------------------------------------------------------
// 1-D convolution over the token axis.
//
// out[t,f] = bias[f] + sum over (i,d) of kernels[f,i,d] * input[t+i,d],
// accumulated in exactly that order.

inline Tensor conv1d_forward(const Tensor& input, const Tensor& kernels,
                             const Tensor& bias) {
  const std::size_t length = input.dim(0);
  const std::size_t dim = input.dim(1);
  const std::size_t filters = kernels.dim(0);
  const std::size_t width = kernels.dim(1);
  if (kernels.dim(2) != dim) {
    throw ShapeError("conv1d: kernel depth does not match input depth");
  }
  if (width > length) {
    throw ShapeError("conv1d: kernel width exceeds input length");
  }
  const std::size_t steps = length - width + 1;
  Tensor out = Tensor::zeros({steps, filters});
  for (std::size_t t = 0; t < steps; ++t) {
    double* out_row = out.row(t);
    for (std::size_t f = 0; f < filters; ++f) {
      double acc = bias.at(f);
      const double* k = &kernels.data[f * width * dim];
      for (std::size_t i = 0; i < width; ++i) {
        const double* in_row = input.row(t + i);
        const double* k_row = k + i * dim;
        for (std::size_t d = 0; d < dim; ++d) {
          acc += k_row[d] * in_row[d];
        }
      }
      out_row[f] = acc;
    }
  }
  return out;
}

// d_kernels and d_bias accumulate in place so one call per document can
// build up the batch gradient; d_input is overwritten.
inline void conv1d_backward(const Tensor& input, const Tensor& kernels,
                            const Tensor& d_out, Tensor& d_input,
                            Tensor& d_kernels, Tensor& d_bias) {
  const std::size_t length = input.dim(0);
  const std::size_t dim = input.dim(1);
  const std::size_t filters = kernels.dim(0);
  const std::size_t width = kernels.dim(1);
  const std::size_t steps = length - width + 1;

  d_input = Tensor::zeros({length, dim});
  for (std::size_t t = 0; t < steps; ++t) {
    const double* g_row = d_out.row(t);
    for (std::size_t f = 0; f < filters; ++f) {
      const double g = g_row[f];
      if (g == 0.0) continue;
      d_bias.at(f) += g;
      const double* k = &kernels.data[f * width * dim];
      double* dk = &d_kernels.data[f * width * dim];
      for (std::size_t i = 0; i < width; ++i) {
        const double* in_row = input.row(t + i);
        double* din_row = d_input.row(t + i);
        const double* k_row = k + i * dim;
        double* dk_row = dk + i * dim;
        for (std::size_t d = 0; d < dim; ++d) {
          dk_row[d] += g * in_row[d];
          din_row[d] += g * k_row[d];
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Max pooling over the time axis; first maximum wins, and the backward
// pass routes gradient only to the recorded positions.

struct PoolResult {
  Tensor pooled;                   // one value per filter
  std::vector<std::size_t> argmax;  // first maximizing time step per filter
};

inline PoolResult max_pool_over_time(const Tensor& features) {
  const std::size_t steps = features.dim(0);
  const std::size_t filters = features.dim(1);
  if (steps == 0) {
    throw ShapeError("max pool requires at least one time step");
  }
  PoolResult result;
  result.pooled = Tensor::zeros({filters});
  result.argmax.assign(filters, 0);
  for (std::size_t f = 0; f < filters; ++f) {
    double best = features.at(0, f);
    std::size_t best_t = 0;
    for (std::size_t t = 1; t < steps; ++t) {
      const double v = features.at(t, f);
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    result.pooled.at(f) = best;
    result.argmax[f] = best_t;
  }
  return result;
}

inline void max_pool_backward(const PoolResult& pool, const Tensor& d_pooled,
                              Tensor& d_features) {
  const std::size_t filters = d_pooled.dim(0);
  for (std::size_t f = 0; f < filters; ++f) {
    d_features.at(pool.argmax[f], f) += d_pooled.at(f);
  }
}

// ---------------------------------------------------------------------------
// Dense layer: y = x W + b, rows are samples.

inline Tensor linear_forward(const Tensor& x, const Tensor& weight,
                             const Tensor& bias) {
  const std::size_t rows = x.dim(0);
  const std::size_t in_dim = x.dim(1);
  if (weight.dim(0) != in_dim || weight.dim(1) != bias.dim(0)) {
    throw ShapeError("linear: weight/bias shapes do not conform");
  }
  const std::size_t out_dim = weight.dim(1);
  Tensor y = Tensor::zeros({rows, out_dim});
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x.row(r);
    double* yr = y.row(r);
    for (std::size_t o = 0; o < out_dim; ++o) yr[o] = bias.at(o);
    for (std::size_t i = 0; i < in_dim; ++i) {
      const double xi = xr[i];
      const double* wr = weight.row(i);
      for (std::size_t o = 0; o < out_dim; ++o) {
        yr[o] += xi * wr[o];
      }
    }
  }
  return y;
}

inline void linear_backward(const Tensor& x, const Tensor& weight,
                            const Tensor& d_y, Tensor& d_x, Tensor& d_weight,
                            Tensor& d_bias) {
  const std::size_t rows = x.dim(0);
  const std::size_t in_dim = x.dim(1);
  const std::size_t out_dim = weight.dim(1);
  d_x = Tensor::zeros({rows, in_dim});
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x.row(r);
    const double* gr = d_y.row(r);
    double* dxr = d_x.row(r);
    for (std::size_t o = 0; o < out_dim; ++o) d_bias.at(o) += gr[o];
    for (std::size_t i = 0; i < in_dim; ++i) {
      const double* wr = weight.row(i);
      double* dwr = d_weight.row(i);
      double acc = 0.0;
      for (std::size_t o = 0; o < out_dim; ++o) {
        dwr[o] += xr[i] * gr[o];
        acc += gr[o] * wr[o];
      }
      dxr[i] = acc;
    }
  }
}

// ---------------------------------------------------------------------------
// ReLU; the subgradient at exactly zero is zero.

inline Tensor relu_forward(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data) {
    if (v < 0.0) v = 0.0;
  }
  return y;
}

inline Tensor relu_backward(const Tensor& x, const Tensor& d_y) {
  Tensor d_x = d_y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.at(i) <= 0.0) d_x.at(i) = 0.0;
  }
  return d_x;
}

// ---------------------------------------------------------------------------
// Batch normalization over rows (samples) for each feature column.

struct BatchNormCache {
  Tensor input;       // pre-normalization activations
  Tensor normalized;  // (x - mean) / sqrt(var + eps)
  Tensor mean;        // per-feature batch mean
  Tensor var;         // per-feature biased batch variance
};

inline Tensor batch_norm_forward(const Tensor& x, const BatchNormState& state,
                                 BatchNormMode mode, BatchNormCache* cache) {
  const std::size_t rows = x.dim(0);
  const std::size_t features = x.dim(1);
  if (state.gamma.dim(0) != features) {
    throw ShapeError("batch norm: feature count mismatch");
  }
  Tensor y = Tensor::zeros({rows, features});
  if (mode == BatchNormMode::infer) {
    for (std::size_t f = 0; f < features; ++f) {
      const double scale =
          state.gamma.at(f) / std::sqrt(state.running_var.at(f) + state.epsilon);
      const double shift = state.beta.at(f) - scale * state.running_mean.at(f);
      for (std::size_t r = 0; r < rows; ++r) {
        y.at(r, f) = scale * x.at(r, f) + shift;
      }
    }
    return y;
  }

  if (rows < 2) {
    throw ShapeError("batch norm training mode needs a batch of >= 2");
  }
  Tensor mean = Tensor::zeros({features});
  Tensor var = Tensor::zeros({features});
  for (std::size_t f = 0; f < features; ++f) {
    double sum = 0.0;
    for (std::size_t r = 0; r < rows; ++r) sum += x.at(r, f);
    mean.at(f) = sum / static_cast<double>(rows);
    double ss = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = x.at(r, f) - mean.at(f);
      ss += d * d;
    }
    var.at(f) = ss / static_cast<double>(rows);
  }
  Tensor normalized = Tensor::zeros({rows, features});
  for (std::size_t f = 0; f < features; ++f) {
    const double inv_std = 1.0 / std::sqrt(var.at(f) + state.epsilon);
    for (std::size_t r = 0; r < rows; ++r) {
      const double xhat = (x.at(r, f) - mean.at(f)) * inv_std;
      normalized.at(r, f) = xhat;
      y.at(r, f) = state.gamma.at(f) * xhat + state.beta.at(f);
    }
  }
  if (cache != nullptr) {
    cache->input = x;
    cache->normalized = normalized;
    cache->mean = mean;
    cache->var = var;
  }
  return y;
}

// Blend the cached batch statistics into the running estimates;
// running <- (1 - momentum) * running + momentum * batch. The variance is
// stored with Bessel's correction for use at inference time.
inline void batch_norm_update_running(BatchNormState& state,
                                      const BatchNormCache& cache,
                                      std::size_t batch_rows) {
  const std::size_t features = state.gamma.dim(0);
  const double unbias =
      batch_rows > 1
          ? static_cast<double>(batch_rows) / static_cast<double>(batch_rows - 1)
          : 1.0;
  for (std::size_t f = 0; f < features; ++f) {
    state.running_mean.at(f) = (1.0 - state.momentum) * state.running_mean.at(f) +
                               state.momentum * cache.mean.at(f);
    state.running_var.at(f) = (1.0 - state.momentum) * state.running_var.at(f) +
                              state.momentum * cache.var.at(f) * unbias;
  }
}

inline Tensor batch_norm_backward(const BatchNormCache& cache,
                                  const BatchNormState& state,
                                  const Tensor& d_y, Tensor& d_gamma,
                                  Tensor& d_beta) {
  const std::size_t rows = cache.input.dim(0);
  const std::size_t features = cache.input.dim(1);
  const double n = static_cast<double>(rows);
  Tensor d_x = Tensor::zeros({rows, features});
  for (std::size_t f = 0; f < features; ++f) {
    const double inv_std = 1.0 / std::sqrt(cache.var.at(f) + state.epsilon);
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double g = d_y.at(r, f);
      sum_dy += g;
      sum_dy_xhat += g * cache.normalized.at(r, f);
    }
    d_gamma.at(f) += sum_dy_xhat;
    d_beta.at(f) += sum_dy;
    const double gamma = state.gamma.at(f);
    for (std::size_t r = 0; r < rows; ++r) {
      const double g = d_y.at(r, f);
      const double xhat = cache.normalized.at(r, f);
      d_x.at(r, f) =
          gamma * inv_std * (g - sum_dy / n - xhat * sum_dy_xhat / n);
    }
  }
  return d_x;
}

// ---------------------------------------------------------------------------
// Softmax cross-entropy over rows.

struct SoftmaxResult {
  double loss = 0.0;
  Tensor probs;
};

// Max-subtracted softmax; loss is the (optionally class-weighted) mean
// negative log probability of the true class.
inline SoftmaxResult softmax_cross_entropy(
    const Tensor& logits, const std::vector<int>& labels,
    const std::vector<double>* class_weights = nullptr) {
  const std::size_t rows = logits.dim(0);
  const std::size_t classes = logits.dim(1);
  if (labels.size() != rows) {
    throw ShapeError("softmax: label count does not match batch size");
  }
  SoftmaxResult result;
  result.probs = Tensor::zeros({rows, classes});
  double loss_sum = 0.0;
  double weight_sum = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const int label = labels[r];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw RangeError("softmax: label out of range: " + std::to_string(label));
    }
    const double* lr = logits.row(r);
    double max_logit = lr[0];
    for (std::size_t k = 1; k < classes; ++k) {
      if (lr[k] > max_logit) max_logit = lr[k];
    }
    double sum = 0.0;
    double* pr = result.probs.row(r);
    for (std::size_t k = 0; k < classes; ++k) {
      pr[k] = std::exp(lr[k] - max_logit);
      sum += pr[k];
    }
    for (std::size_t k = 0; k < classes; ++k) pr[k] /= sum;
    const double w =
        class_weights == nullptr ? 1.0 : (*class_weights)[static_cast<std::size_t>(label)];
    loss_sum += -w * (lr[static_cast<std::size_t>(label)] - max_logit - std::log(sum));
    weight_sum += w;
  }
  result.loss = loss_sum / weight_sum;
  return result;
}

// Gradient of the loss above with respect to the logits.
inline Tensor softmax_cross_entropy_backward(
    const SoftmaxResult& result, const std::vector<int>& labels,
    const std::vector<double>* class_weights = nullptr) {
  const std::size_t rows = result.probs.dim(0);
  const std::size_t classes = result.probs.dim(1);
  double weight_sum = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    weight_sum += class_weights == nullptr
                      ? 1.0
                      : (*class_weights)[static_cast<std::size_t>(labels[r])];
  }
  Tensor d_logits = Tensor::zeros({rows, classes});
  for (std::size_t r = 0; r < rows; ++r) {
    const double w = class_weights == nullptr
                         ? 1.0
                         : (*class_weights)[static_cast<std::size_t>(labels[r])];
    const double* pr = result.probs.row(r);
    double* gr = d_logits.row(r);
    for (std::size_t k = 0; k < classes; ++k) {
      gr[k] = w * pr[k] / weight_sum;
    }
    gr[static_cast<std::size_t>(labels[r])] -= w / weight_sum;
  }
  return d_logits;
}

// ---------------------------------------------------------------------------
// SGD with classical momentum:
//   velocity <- momentum * velocity - lr * grad
//   param    <- param + velocity

inline void sgd_step(Tensor& param, const Tensor& grad, Tensor& velocity,
                     double learning_rate, double momentum) {
  require_same_shape(param, grad, "sgd step");
  require_same_shape(param, velocity, "sgd step");
  for (std::size_t i = 0; i < param.size(); ++i) {
    velocity.at(i) = momentum * velocity.at(i) - learning_rate * grad.at(i);
    param.at(i) += velocity.at(i);
  }
}

}  // namespace sentiscore
