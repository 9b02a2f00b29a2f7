#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "sentiscore/model.hpp"
#include "sentiscore/rng.hpp"

namespace sentiscore {

inline double gradcheck_relative_error(double analytic, double numeric) {
  const double denom =
      std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
  return std::fabs(analytic - numeric) / denom;
}

// Compare the supplied analytic gradients against central finite differences
// of the train-mode batch loss. Per tensor, at least 32 coordinates are
// probed (all of them when the tensor is smaller), sampled deterministically
// from sample_seed. Returns the worst relative error seen.
inline double max_rel_error_vs_fd(const ModelParameters& model,
                                  const LayerGradients& gradients,
                                  const std::vector<EncodedDoc>& docs,
                                  const std::vector<int>& labels,
                                  double epsilon,
                                  std::uint64_t sample_seed = 0x5EED) {
  if (!(epsilon > 0.0)) {
    throw RangeError("gradient check epsilon must be positive");
  }
  ModelParameters probe = model;
  LayerGradients grads = gradients;  // mutable copy to zip with probe

  const auto loss_at = [&]() {
    SoftmaxResult r =
        forward_batch(probe, docs, labels, BatchNormMode::train, nullptr);
    if (!std::isfinite(r.loss)) {
      throw NumericError("non-finite loss during gradient check");
    }
    return r.loss;
  };

  Rng rng(sample_seed);
  double max_err = 0.0;
  for_each_trainable(
      probe, grads, [&](const char*, Tensor& param, Tensor& grad) {
        std::vector<std::size_t> coords(param.size());
        std::iota(coords.begin(), coords.end(), 0);
        if (coords.size() > 32) {
          // partial Fisher-Yates: the first 32 entries become the sample
          for (std::size_t i = 0; i < 32; ++i) {
            std::swap(coords[i],
                      coords[i + uniform_index(rng, coords.size() - i)]);
          }
          coords.resize(32);
        }
        for (std::size_t coord : coords) {
          const double saved = param.at(coord);
          param.at(coord) = saved + epsilon;
          const double plus = loss_at();
          param.at(coord) = saved - epsilon;
          const double minus = loss_at();
          param.at(coord) = saved;
          const double numeric = (plus - minus) / (2.0 * epsilon);
          // Central differences cannot resolve gradients below the
          // cancellation noise of the two loss values. Some parameters have
          // an exactly-zero gradient (a constant shift ahead of batch norm
          // never reaches the loss); both sides then sit in the noise and
          // the pair counts as matching zeros.
          const double noise_floor =
              32.0 * std::numeric_limits<double>::epsilon() *
              std::max({std::fabs(plus), std::fabs(minus), 1.0}) /
              (2.0 * epsilon);
          if (std::fabs(numeric) < noise_floor &&
              std::fabs(grad.at(coord)) < noise_floor) {
            continue;
          }
          max_err = std::max(max_err,
                             gradcheck_relative_error(grad.at(coord), numeric));
        }
      });
  return max_err;
}

// Backprop the batch, then verify the analytic gradients numerically.
inline double grad_check(const ModelParameters& model,
                         const std::vector<EncodedDoc>& docs,
                         const std::vector<int>& labels, double epsilon,
                         std::uint64_t sample_seed = 0x5EED) {
  LayerGradients grads = backprop(model, docs, labels);
  return max_rel_error_vs_fd(model, grads, docs, labels, epsilon, sample_seed);
}

}  // namespace sentiscore
