#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sentiscore/corpus.hpp"
#include "sentiscore/error.hpp"
#include "sentiscore/layers.hpp"
#include "sentiscore/rng.hpp"
#include "sentiscore/tensor.hpp"
#include "sentiscore/text.hpp"

namespace sentiscore {

struct ModelConfig {
  std::size_t vocab_top_n = 10000;
  std::size_t doc_length = 64;
  std::size_t embed_dim = 32;
  std::size_t filters = 64;
  std::size_t kernel_width = 3;
  std::size_t hidden_dim = 64;
  std::size_t num_classes = 10;  // 10, 5 or 3
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  std::uint64_t seed = 1;
  double bn_momentum = 0.1;
  double bn_epsilon = 1e-5;
  // Inverse-frequency class weighting of the loss; off by default.
  bool class_weighting = false;
};

inline void validate_model_config(const ModelConfig& c) {
  if (c.vocab_top_n < 1 || c.doc_length < 1 || c.embed_dim < 1 ||
      c.filters < 1 || c.kernel_width < 1 || c.hidden_dim < 1 ||
      c.batch_size < 1) {
    throw RangeError("model config: all size parameters must be >= 1");
  }
  if (c.num_classes != 10 && c.num_classes != 5 && c.num_classes != 3) {
    throw RangeError("model config: num_classes must be 10, 5 or 3");
  }
  if (c.kernel_width > c.doc_length) {
    throw ShapeError("model config: kernel width exceeds document length");
  }
  if (!(c.learning_rate > 0.0)) {
    throw RangeError("model config: learning rate must be positive");
  }
  if (c.momentum < 0.0 || c.momentum >= 1.0) {
    throw RangeError("model config: momentum must be in [0, 1)");
  }
}

// Every trainable tensor of the classifier, plus batch-norm running
// statistics and an echo of the configuration it was built with.
struct ModelParameters {
  ModelConfig config;
  Tensor embedding;      // V x D
  Tensor conv_kernels;   // F x w x D
  Tensor conv_bias;      // F
  Tensor hidden_weight;  // F x H
  Tensor hidden_bias;    // H
  BatchNormState bn;     // H features
  Tensor output_weight;  // H x K
  Tensor output_bias;    // K

  std::size_t vocab_size() const { return embedding.dim(0); }
};

// Gradients for the nine trainable tensors, shape-matched.
struct LayerGradients {
  Tensor embedding;
  Tensor conv_kernels;
  Tensor conv_bias;
  Tensor hidden_weight;
  Tensor hidden_bias;
  Tensor bn_gamma;
  Tensor bn_beta;
  Tensor output_weight;
  Tensor output_bias;

  static LayerGradients zeros_like(const ModelParameters& m) {
    LayerGradients g;
    g.embedding = Tensor::zeros(m.embedding.shape);
    g.conv_kernels = Tensor::zeros(m.conv_kernels.shape);
    g.conv_bias = Tensor::zeros(m.conv_bias.shape);
    g.hidden_weight = Tensor::zeros(m.hidden_weight.shape);
    g.hidden_bias = Tensor::zeros(m.hidden_bias.shape);
    g.bn_gamma = Tensor::zeros(m.bn.gamma.shape);
    g.bn_beta = Tensor::zeros(m.bn.beta.shape);
    g.output_weight = Tensor::zeros(m.output_weight.shape);
    g.output_bias = Tensor::zeros(m.output_bias.shape);
    return g;
  }
};

// Visit the trainable tensors of a model and, in the same fixed order, any
// parallel structures (gradients, velocities).
template <typename Fn>
void for_each_trainable(ModelParameters& m, LayerGradients& g, Fn&& fn) {
  fn("embedding", m.embedding, g.embedding);
  fn("conv_kernels", m.conv_kernels, g.conv_kernels);
  fn("conv_bias", m.conv_bias, g.conv_bias);
  fn("hidden_weight", m.hidden_weight, g.hidden_weight);
  fn("hidden_bias", m.hidden_bias, g.hidden_bias);
  fn("bn_gamma", m.bn.gamma, g.bn_gamma);
  fn("bn_beta", m.bn.beta, g.bn_beta);
  fn("output_weight", m.output_weight, g.output_weight);
  fn("output_bias", m.output_bias, g.output_bias);
}

template <typename Fn>
void for_each_gradient(LayerGradients& g, Fn&& fn) {
  fn("embedding", g.embedding);
  fn("conv_kernels", g.conv_kernels);
  fn("conv_bias", g.conv_bias);
  fn("hidden_weight", g.hidden_weight);
  fn("hidden_bias", g.hidden_bias);
  fn("bn_gamma", g.bn_gamma);
  fn("bn_beta", g.bn_beta);
  fn("output_weight", g.output_weight);
  fn("output_bias", g.output_bias);
}

inline void apply_sgd(ModelParameters& m, const LayerGradients& grads,
                      LayerGradients& velocity, double learning_rate,
                      double momentum) {
  sgd_step(m.embedding, grads.embedding, velocity.embedding, learning_rate,
           momentum);
  sgd_step(m.conv_kernels, grads.conv_kernels, velocity.conv_kernels,
           learning_rate, momentum);
  sgd_step(m.conv_bias, grads.conv_bias, velocity.conv_bias, learning_rate,
           momentum);
  sgd_step(m.hidden_weight, grads.hidden_weight, velocity.hidden_weight,
           learning_rate, momentum);
  sgd_step(m.hidden_bias, grads.hidden_bias, velocity.hidden_bias,
           learning_rate, momentum);
  sgd_step(m.bn.gamma, grads.bn_gamma, velocity.bn_gamma, learning_rate,
           momentum);
  sgd_step(m.bn.beta, grads.bn_beta, velocity.bn_beta, learning_rate,
           momentum);
  sgd_step(m.output_weight, grads.output_weight, velocity.output_weight,
           learning_rate, momentum);
  sgd_step(m.output_bias, grads.output_bias, velocity.output_bias,
           learning_rate, momentum);
}

namespace detail {

// Glorot-style symmetric uniform init.
inline void init_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out,
                         Rng& rng) {
  const double bound =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.data) {
    v = uniform_range(rng, -bound, bound);
  }
}

}  // namespace detail

inline ModelParameters build_model(const ModelConfig& config,
                                   const Vocabulary& vocab) {
  validate_model_config(config);
  ModelParameters m;
  m.config = config;
  const std::size_t v = vocab.size();
  const std::size_t d = config.embed_dim;
  const std::size_t f = config.filters;
  const std::size_t w = config.kernel_width;
  const std::size_t h = config.hidden_dim;
  const std::size_t k = config.num_classes;

  Rng rng(config.seed);
  m.embedding = Tensor::zeros({v, d});
  detail::init_uniform(m.embedding, v, d, rng);
  m.conv_kernels = Tensor::zeros({f, w, d});
  detail::init_uniform(m.conv_kernels, w * d, f, rng);
  m.conv_bias = Tensor::zeros({f});
  m.hidden_weight = Tensor::zeros({f, h});
  detail::init_uniform(m.hidden_weight, f, h, rng);
  m.hidden_bias = Tensor::zeros({h});
  m.bn = BatchNormState::create(h, config.bn_momentum, config.bn_epsilon);
  m.output_weight = Tensor::zeros({h, k});
  detail::init_uniform(m.output_weight, h, k, rng);
  m.output_bias = Tensor::zeros({k});
  return m;
}

// ---------------------------------------------------------------------------
// Forward and backward over a batch.

struct ForwardCache {
  std::vector<Tensor> embedded;      // per doc, L x D
  std::vector<Tensor> conv_out;      // per doc, (L-w+1) x F
  std::vector<PoolResult> pools;     // per doc
  Tensor pooled;                     // B x F
  Tensor hidden_pre;                 // B x H, before batch norm
  BatchNormCache bn_cache;           // train mode only
  Tensor bn_out;                     // B x H
  Tensor activated;                  // B x H, after ReLU
  Tensor logits;                     // B x K
};

// Pure function of (parameters, batch); running statistics are not touched.
// Pass a cache to keep the intermediates needed for the backward pass.
inline SoftmaxResult forward_batch(const ModelParameters& m,
                                   const std::vector<EncodedDoc>& docs,
                                   const std::vector<int>& labels,
                                   BatchNormMode mode, ForwardCache* cache,
                                   const std::vector<double>* class_weights =
                                       nullptr) {
  const std::size_t batch = docs.size();
  if (batch == 0) {
    throw EmptyInputError("forward pass on an empty batch");
  }
  const std::size_t filters = m.config.filters;
  ForwardCache local;
  ForwardCache& c = cache != nullptr ? *cache : local;

  c.embedded.clear();
  c.conv_out.clear();
  c.pools.clear();
  c.embedded.reserve(batch);
  c.conv_out.reserve(batch);
  c.pools.reserve(batch);
  c.pooled = Tensor::zeros({batch, filters});
  for (std::size_t b = 0; b < batch; ++b) {
    if (docs[b].length() != m.config.doc_length) {
      throw ShapeError("encoded document length does not match the model");
    }
    Tensor embedded = embedding_lookup(m.embedding, docs[b]);
    Tensor conv = conv1d_forward(embedded, m.conv_kernels, m.conv_bias);
    PoolResult pool = max_pool_over_time(conv);
    double* row = c.pooled.row(b);
    for (std::size_t f = 0; f < filters; ++f) row[f] = pool.pooled.at(f);
    c.embedded.push_back(std::move(embedded));
    c.conv_out.push_back(std::move(conv));
    c.pools.push_back(std::move(pool));
  }

  c.hidden_pre = linear_forward(c.pooled, m.hidden_weight, m.hidden_bias);
  c.bn_out = batch_norm_forward(c.hidden_pre, m.bn, mode,
                                mode == BatchNormMode::train ? &c.bn_cache
                                                             : nullptr);
  c.activated = relu_forward(c.bn_out);
  c.logits = linear_forward(c.activated, m.output_weight, m.output_bias);
  return softmax_cross_entropy(c.logits, labels, class_weights);
}

// Exact analytic gradients of the batch loss for every trainable tensor.
inline LayerGradients backprop(const ModelParameters& m,
                               const std::vector<EncodedDoc>& docs,
                               const std::vector<int>& labels,
                               SoftmaxResult* out_result = nullptr,
                               const std::vector<double>* class_weights =
                                   nullptr,
                               ForwardCache* out_cache = nullptr) {
  ForwardCache local_cache;
  ForwardCache& cache = out_cache != nullptr ? *out_cache : local_cache;
  SoftmaxResult result = forward_batch(m, docs, labels, BatchNormMode::train,
                                       &cache, class_weights);
  LayerGradients grads = LayerGradients::zeros_like(m);

  Tensor d_logits =
      softmax_cross_entropy_backward(result, labels, class_weights);
  Tensor d_activated;
  linear_backward(cache.activated, m.output_weight, d_logits, d_activated,
                  grads.output_weight, grads.output_bias);
  Tensor d_bn_out = relu_backward(cache.bn_out, d_activated);
  Tensor d_hidden_pre = batch_norm_backward(cache.bn_cache, m.bn, d_bn_out,
                                            grads.bn_gamma, grads.bn_beta);
  Tensor d_pooled;
  linear_backward(cache.pooled, m.hidden_weight, d_hidden_pre, d_pooled,
                  grads.hidden_weight, grads.hidden_bias);

  const std::size_t batch = docs.size();
  const std::size_t filters = m.config.filters;
  for (std::size_t b = 0; b < batch; ++b) {
    Tensor d_conv = Tensor::zeros(cache.conv_out[b].shape);
    Tensor d_pooled_doc = Tensor::zeros({filters});
    for (std::size_t f = 0; f < filters; ++f) {
      d_pooled_doc.at(f) = d_pooled.at(b, f);
    }
    max_pool_backward(cache.pools[b], d_pooled_doc, d_conv);
    Tensor d_embedded;
    conv1d_backward(cache.embedded[b], m.conv_kernels, d_conv, d_embedded,
                    grads.conv_kernels, grads.conv_bias);
    embedding_backward(docs[b], d_embedded, grads.embedding);
  }
  if (out_result != nullptr) *out_result = result;
  return grads;
}

// ---------------------------------------------------------------------------
// Training.

struct EpochStats {
  double train_loss = 0.0;
  double val_top1 = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;  // index into epochs; 0 when history is empty
};

struct EncodedDataset {
  std::vector<EncodedDoc> docs;
  std::vector<int> labels;  // 0-based class indices
};

inline EncodedDataset encode_corpus(const Corpus& corpus,
                                    const Vocabulary& vocab,
                                    std::size_t doc_length,
                                    std::size_t num_classes) {
  EncodedDataset set;
  set.docs.reserve(corpus.size());
  set.labels.reserve(corpus.size());
  for (const Review& r : corpus.reviews) {
    if (r.score < 1 || static_cast<std::size_t>(r.score) > num_classes) {
      throw RangeError("review '" + r.id + "' has label " +
                       std::to_string(r.score) + " outside 1.." +
                       std::to_string(num_classes));
    }
    set.docs.push_back(encode(tokenize(r.text), vocab, doc_length));
    set.labels.push_back(r.score - 1);
  }
  return set;
}

inline double top1_accuracy(const ModelParameters& m,
                            const EncodedDataset& set) {
  if (set.docs.empty()) return 0.0;
  std::size_t correct = 0;
  std::vector<int> dummy_labels(1, 0);
  std::vector<EncodedDoc> one(1);
  for (std::size_t i = 0; i < set.docs.size(); ++i) {
    one[0] = set.docs[i];
    ForwardCache cache;
    forward_batch(m, one, dummy_labels, BatchNormMode::infer, &cache);
    const double* pr = cache.logits.row(0);
    std::size_t best = 0;
    for (std::size_t k = 1; k < m.config.num_classes; ++k) {
      if (pr[k] > pr[best]) best = k;
    }
    if (static_cast<int>(best) == set.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(set.docs.size());
}

// Mini-batch SGD with momentum over seeded-shuffled epochs. Batch norm runs
// in train mode and its running statistics are refreshed after every step.
// Returns the parameters of the epoch with the best validation top-1
// (earliest wins ties) together with the per-epoch history.
inline std::pair<ModelParameters, TrainHistory> train(
    const ModelParameters& initial, const Vocabulary& vocab,
    const Corpus& train_set, const Corpus& val_set,
    const std::function<void(std::size_t, const EpochStats&)>& on_epoch = {}) {
  const ModelConfig& config = initial.config;
  if (train_set.empty() || val_set.empty()) {
    throw EmptyInputError("training requires non-empty train and val sets");
  }
  if (config.batch_size < 2) {
    throw RangeError("batch size must be >= 2 so batch norm can train");
  }
  EncodedDataset train_data =
      encode_corpus(train_set, vocab, config.doc_length, config.num_classes);
  EncodedDataset val_data =
      encode_corpus(val_set, vocab, config.doc_length, config.num_classes);

  std::vector<double> class_weights;
  if (config.class_weighting) {
    std::vector<std::size_t> counts(config.num_classes, 0);
    for (int label : train_data.labels) ++counts[static_cast<std::size_t>(label)];
    class_weights.resize(config.num_classes);
    for (std::size_t k = 0; k < config.num_classes; ++k) {
      class_weights[k] =
          counts[k] == 0 ? 0.0
                         : static_cast<double>(train_data.labels.size()) /
                               (static_cast<double>(config.num_classes) *
                                static_cast<double>(counts[k]));
    }
  }
  const std::vector<double>* weights_ptr =
      config.class_weighting ? &class_weights : nullptr;

  ModelParameters model = initial;
  LayerGradients velocity = LayerGradients::zeros_like(model);
  TrainHistory history;
  ModelParameters best = model;
  double best_val = -1.0;

  std::vector<std::size_t> order(train_data.docs.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng epoch_rng(config.seed + 0x9E3779B97F4A7C15ULL * (epoch + 1));
    shuffle_in_place(order, epoch_rng);

    double loss_sum = 0.0;
    std::size_t seen = 0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += config.batch_size, ++batch_index) {
      const std::size_t end =
          std::min(begin + config.batch_size, order.size());
      if (end - begin < 2) break;  // batch norm needs >= 2 rows
      std::vector<EncodedDoc> docs;
      std::vector<int> labels;
      docs.reserve(end - begin);
      labels.reserve(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        docs.push_back(train_data.docs[order[i]]);
        labels.push_back(train_data.labels[order[i]]);
      }

      ForwardCache cache;
      SoftmaxResult result;
      LayerGradients grads =
          backprop(model, docs, labels, &result, weights_ptr, &cache);
      if (!std::isfinite(result.loss)) {
        throw DivergenceError("training diverged at epoch " +
                              std::to_string(epoch + 1) + ", batch " +
                              std::to_string(batch_index + 1));
      }
      apply_sgd(model, grads, velocity, config.learning_rate, config.momentum);
      batch_norm_update_running(model.bn, cache.bn_cache, docs.size());

      loss_sum += result.loss * static_cast<double>(docs.size());
      seen += docs.size();
    }

    EpochStats stats;
    stats.train_loss = seen > 0 ? loss_sum / static_cast<double>(seen) : 0.0;
    stats.val_top1 = top1_accuracy(model, val_data);
    history.epochs.push_back(stats);
    if (stats.val_top1 > best_val) {
      best_val = stats.val_top1;
      best = model;
      history.best_epoch = epoch;
    }
    if (on_epoch) on_epoch(epoch, stats);
  }

  if (history.epochs.empty()) {
    return {initial, history};
  }
  return {best, history};
}

// ---------------------------------------------------------------------------
// Prediction and evaluation.

struct Prediction {
  int predicted_class = 0;  // 1-based
  Tensor probs;
};

// Batch norm in inference mode; ties go to the lowest class index.
inline Prediction predict(const ModelParameters& m, const EncodedDoc& doc) {
  std::vector<EncodedDoc> docs{doc};
  std::vector<int> labels{0};
  ForwardCache cache;
  SoftmaxResult result =
      forward_batch(m, docs, labels, BatchNormMode::infer, &cache);
  Prediction pred;
  pred.probs = Tensor::zeros({m.config.num_classes});
  std::size_t best = 0;
  for (std::size_t k = 0; k < m.config.num_classes; ++k) {
    pred.probs.at(k) = result.probs.at(0, k);
    if (result.probs.at(0, k) > result.probs.at(0, best)) best = k;
  }
  pred.predicted_class = static_cast<int>(best) + 1;
  return pred;
}

// Fraction of documents whose true class is among the k most probable.
inline std::vector<double> evaluate_topk(const ModelParameters& m,
                                         const Vocabulary& vocab,
                                         const Corpus& test_set,
                                         const std::vector<std::size_t>& ks) {
  for (std::size_t k : ks) {
    if (k < 1 || k > m.config.num_classes) {
      throw RangeError("top-k rank " + std::to_string(k) +
                       " outside 1.." + std::to_string(m.config.num_classes));
    }
  }
  if (test_set.empty()) {
    throw EmptyInputError("evaluation requires a non-empty test set");
  }
  EncodedDataset data =
      encode_corpus(test_set, vocab, m.config.doc_length, m.config.num_classes);
  std::vector<std::size_t> hits(ks.size(), 0);
  for (std::size_t i = 0; i < data.docs.size(); ++i) {
    Prediction pred = predict(m, data.docs[i]);
    // rank classes by probability, lowest index first on ties
    std::vector<std::size_t> ranking(m.config.num_classes);
    std::iota(ranking.begin(), ranking.end(), 0);
    std::stable_sort(ranking.begin(), ranking.end(),
                     [&](std::size_t a, std::size_t b) {
                       return pred.probs.at(a) > pred.probs.at(b);
                     });
    for (std::size_t j = 0; j < ks.size(); ++j) {
      for (std::size_t r = 0; r < ks[j]; ++r) {
        if (static_cast<int>(ranking[r]) == data.labels[i]) {
          ++hits[j];
          break;
        }
      }
    }
  }
  std::vector<double> accuracies(ks.size());
  for (std::size_t j = 0; j < ks.size(); ++j) {
    accuracies[j] =
        static_cast<double>(hits[j]) / static_cast<double>(data.docs.size());
  }
  return accuracies;
}

// Top-1 accuracy after mapping both the model's 10-level predictions and
// the true labels through the label-coarsening function.
inline double evaluate_coarsened_top1(const ModelParameters& m,
                                      const Vocabulary& vocab,
                                      const Corpus& test_set,
                                      Granularity granularity) {
  if (m.config.num_classes != 10) {
    throw ShapeError("coarsened evaluation needs a 10-class model");
  }
  if (test_set.empty()) {
    throw EmptyInputError("evaluation requires a non-empty test set");
  }
  EncodedDataset data =
      encode_corpus(test_set, vocab, m.config.doc_length, 10);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.docs.size(); ++i) {
    Prediction pred = predict(m, data.docs[i]);
    const int coarse_pred = coarsen_label(pred.predicted_class, granularity);
    const int coarse_true = coarsen_label(data.labels[i] + 1, granularity);
    if (coarse_pred == coarse_true) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.docs.size());
}

// ---------------------------------------------------------------------------
// Binary model file: magic, version, config, then shape-prefixed row-major
// little-endian 64-bit payloads in a fixed tensor order.

namespace detail {

inline constexpr char kModelMagic[8] = {'S', 'S', 'C', 'M', 'O', 'D', 'E', 'L'};
inline constexpr std::uint32_t kModelVersion = 1;

inline void write_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 8);
}

inline void write_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 4);
}

inline void write_f64(std::ostream& out, double v) {
  write_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct ModelReader {
  std::ifstream in;
  std::string path;

  explicit ModelReader(const std::string& p)
      : in(p, std::ios::binary), path(p) {
    if (!in) throw IoError("cannot open model file: " + p);
  }

  void read_bytes(char* buf, std::size_t n) {
    in.read(buf, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      throw FormatError("truncated model file: " + path);
    }
  }

  std::uint64_t read_u64() {
    char buf[8];
    read_bytes(buf, 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
      v = (v << 8) | static_cast<unsigned char>(buf[i]);
    }
    return v;
  }

  std::uint32_t read_u32() {
    char buf[4];
    read_bytes(buf, 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | static_cast<unsigned char>(buf[i]);
    }
    return v;
  }

  double read_f64() { return std::bit_cast<double>(read_u64()); }
};

inline void write_tensor(std::ostream& out, const Tensor& t) {
  write_u32(out, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape) write_u64(out, d);
  for (double v : t.data) write_f64(out, v);
}

inline Tensor read_tensor(ModelReader& r) {
  const std::uint32_t rank = r.read_u32();
  if (rank == 0 || rank > 4) {
    throw FormatError("corrupt tensor header in model file: " + r.path);
  }
  // generous caps, but small enough that corruption cannot trigger a
  // runaway allocation before the truncation check fires
  constexpr std::uint64_t kMaxDim = 1ULL << 28;
  constexpr std::uint64_t kMaxTotal = 1ULL << 30;
  std::vector<std::size_t> shape(rank);
  std::uint64_t total = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint64_t dim = r.read_u64();
    if (dim == 0 || dim > kMaxDim) {
      throw FormatError("corrupt tensor shape in model file: " + r.path);
    }
    total *= dim;
    if (total > kMaxTotal) {
      throw FormatError("corrupt tensor shape in model file: " + r.path);
    }
    shape[i] = static_cast<std::size_t>(dim);
  }
  Tensor t = Tensor::zeros(shape);
  for (std::uint64_t i = 0; i < total; ++i) t.data[i] = r.read_f64();
  return t;
}

}  // namespace detail

inline void save_model(const ModelParameters& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file: " + path);
  out.write(detail::kModelMagic, sizeof(detail::kModelMagic));
  detail::write_u32(out, detail::kModelVersion);
  detail::write_u64(out, m.config.vocab_top_n);
  detail::write_u64(out, m.config.doc_length);
  detail::write_u64(out, m.config.embed_dim);
  detail::write_u64(out, m.config.filters);
  detail::write_u64(out, m.config.kernel_width);
  detail::write_u64(out, m.config.hidden_dim);
  detail::write_u64(out, m.config.num_classes);
  detail::write_f64(out, m.config.learning_rate);
  detail::write_f64(out, m.config.momentum);
  detail::write_u64(out, m.config.epochs);
  detail::write_u64(out, m.config.batch_size);
  detail::write_u64(out, m.config.seed);
  detail::write_f64(out, m.config.bn_momentum);
  detail::write_f64(out, m.config.bn_epsilon);
  detail::write_u32(out, m.config.class_weighting ? 1 : 0);
  detail::write_f64(out, m.bn.momentum);
  detail::write_f64(out, m.bn.epsilon);

  detail::write_tensor(out, m.embedding);
  detail::write_tensor(out, m.conv_kernels);
  detail::write_tensor(out, m.conv_bias);
  detail::write_tensor(out, m.hidden_weight);
  detail::write_tensor(out, m.hidden_bias);
  detail::write_tensor(out, m.bn.gamma);
  detail::write_tensor(out, m.bn.beta);
  detail::write_tensor(out, m.bn.running_mean);
  detail::write_tensor(out, m.bn.running_var);
  detail::write_tensor(out, m.output_weight);
  detail::write_tensor(out, m.output_bias);
  if (!out) throw IoError("write failed: " + path);
}

inline ModelParameters load_model(const std::string& path) {
  detail::ModelReader r(path);
  char magic[sizeof(detail::kModelMagic)];
  r.read_bytes(magic, sizeof(magic));
  if (!std::equal(std::begin(magic), std::end(magic),
                  std::begin(detail::kModelMagic))) {
    throw FormatError("not a model file (bad magic): " + path);
  }
  const std::uint32_t version = r.read_u32();
  if (version != detail::kModelVersion) {
    throw FormatError("unsupported model file version " +
                      std::to_string(version) + ": " + path);
  }
  ModelParameters m;
  m.config.vocab_top_n = r.read_u64();
  m.config.doc_length = r.read_u64();
  m.config.embed_dim = r.read_u64();
  m.config.filters = r.read_u64();
  m.config.kernel_width = r.read_u64();
  m.config.hidden_dim = r.read_u64();
  m.config.num_classes = r.read_u64();
  m.config.learning_rate = r.read_f64();
  m.config.momentum = r.read_f64();
  m.config.epochs = r.read_u64();
  m.config.batch_size = r.read_u64();
  m.config.seed = r.read_u64();
  m.config.bn_momentum = r.read_f64();
  m.config.bn_epsilon = r.read_f64();
  m.config.class_weighting = r.read_u32() != 0;
  m.bn.momentum = r.read_f64();
  m.bn.epsilon = r.read_f64();

  m.embedding = detail::read_tensor(r);
  m.conv_kernels = detail::read_tensor(r);
  m.conv_bias = detail::read_tensor(r);
  m.hidden_weight = detail::read_tensor(r);
  m.hidden_bias = detail::read_tensor(r);
  m.bn.gamma = detail::read_tensor(r);
  m.bn.beta = detail::read_tensor(r);
  m.bn.running_mean = detail::read_tensor(r);
  m.bn.running_var = detail::read_tensor(r);
  m.output_weight = detail::read_tensor(r);
  m.output_bias = detail::read_tensor(r);

  r.in.peek();
  if (!r.in.eof()) {
    throw FormatError("trailing bytes in model file: " + path);
  }
  validate_model_config(m.config);
  return m;
}

}  // namespace sentiscore
