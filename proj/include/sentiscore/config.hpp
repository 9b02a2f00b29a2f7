#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "sentiscore/corpus.hpp"
#include "sentiscore/error.hpp"
#include "sentiscore/model.hpp"

namespace sentiscore {

// Everything one pipeline run needs, loadable from a key = value file and
// overridable per key from the command line.
struct PipelineConfig {
  std::string corpus_path = "data/reviews.tsv";
  std::string participants_path = "data/participants.csv";
  std::string models_dir = "models";
  std::string output_dir = "out";

  // Synthetic corpus: review count, per-score weights, generation seed.
  std::size_t synth_reviews = 38265;
  std::array<double, 10> synth_weights = {4610, 511,  452,  497,  997,
                                          1287, 2157, 3706, 4426, 19622};
  std::uint64_t synth_seed = 1;

  SplitSpec split{0.7, 0.15, 0.15, 1};

  // Shared hyperparameters; num_classes is set by the command that uses it.
  ModelConfig model;

  int cesd_cutoff = 21;
  double panas_threshold = 61.890;
};

namespace detail {

inline double parse_double(const std::string& s, const std::string& context) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError(context + ": not a number: '" + s + "'");
  }
  if (pos != s.size()) {
    throw UsageError(context + ": not a number: '" + s + "'");
  }
  return value;
}

inline std::uint64_t parse_u64(const std::string& s,
                               const std::string& context) {
  std::size_t pos = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw UsageError(context + ": not a non-negative integer: '" + s + "'");
  }
  if (pos != s.size()) {
    throw UsageError(context + ": not a non-negative integer: '" + s + "'");
  }
  return value;
}

inline bool parse_bool(const std::string& s, const std::string& context) {
  if (s == "1" || s == "true" || s == "on") return true;
  if (s == "0" || s == "false" || s == "off") return false;
  throw UsageError(context + ": expected a boolean, got '" + s + "'");
}

}  // namespace detail

inline void apply_config_override(PipelineConfig& cfg, const std::string& key,
                                  const std::string& value) {
  const std::string ctx = "config key '" + key + "'";
  if (key == "corpus_path") {
    cfg.corpus_path = value;
  } else if (key == "participants_path") {
    cfg.participants_path = value;
  } else if (key == "models_dir") {
    cfg.models_dir = value;
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "synth_reviews") {
    cfg.synth_reviews = detail::parse_u64(value, ctx);
  } else if (key == "synth_seed") {
    cfg.synth_seed = detail::parse_u64(value, ctx);
  } else if (key == "synth_weights") {
    std::array<double, 10> weights{};
    std::size_t begin = 0;
    for (std::size_t i = 0; i < 10; ++i) {
      std::size_t comma = value.find(',', begin);
      const bool last = i == 9;
      if (last != (comma == std::string::npos)) {
        throw UsageError(ctx + ": expected 10 comma-separated weights");
      }
      weights[i] = detail::parse_double(
          value.substr(begin, last ? std::string::npos : comma - begin), ctx);
      begin = comma + 1;
    }
    cfg.synth_weights = weights;
  } else if (key == "train_ratio") {
    cfg.split.train_ratio = detail::parse_double(value, ctx);
  } else if (key == "val_ratio") {
    cfg.split.val_ratio = detail::parse_double(value, ctx);
  } else if (key == "test_ratio") {
    cfg.split.test_ratio = detail::parse_double(value, ctx);
  } else if (key == "split_seed") {
    cfg.split.seed = detail::parse_u64(value, ctx);
  } else if (key == "vocab_top_n") {
    cfg.model.vocab_top_n = detail::parse_u64(value, ctx);
  } else if (key == "doc_length") {
    cfg.model.doc_length = detail::parse_u64(value, ctx);
  } else if (key == "embed_dim") {
    cfg.model.embed_dim = detail::parse_u64(value, ctx);
  } else if (key == "filters") {
    cfg.model.filters = detail::parse_u64(value, ctx);
  } else if (key == "kernel_width") {
    cfg.model.kernel_width = detail::parse_u64(value, ctx);
  } else if (key == "hidden_dim") {
    cfg.model.hidden_dim = detail::parse_u64(value, ctx);
  } else if (key == "learning_rate") {
    cfg.model.learning_rate = detail::parse_double(value, ctx);
  } else if (key == "momentum") {
    cfg.model.momentum = detail::parse_double(value, ctx);
  } else if (key == "epochs") {
    cfg.model.epochs = detail::parse_u64(value, ctx);
  } else if (key == "batch_size") {
    cfg.model.batch_size = detail::parse_u64(value, ctx);
  } else if (key == "model_seed") {
    cfg.model.seed = detail::parse_u64(value, ctx);
  } else if (key == "bn_momentum") {
    cfg.model.bn_momentum = detail::parse_double(value, ctx);
  } else if (key == "bn_epsilon") {
    cfg.model.bn_epsilon = detail::parse_double(value, ctx);
  } else if (key == "class_weighting") {
    cfg.model.class_weighting = detail::parse_bool(value, ctx);
  } else if (key == "cesd_cutoff") {
    cfg.cesd_cutoff = static_cast<int>(detail::parse_u64(value, ctx));
  } else if (key == "panas_threshold") {
    cfg.panas_threshold = detail::parse_double(value, ctx);
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

// key = value file; blank lines and everything after '#' are ignored.
inline PipelineConfig load_pipeline_config(const std::string& path) {
  PipelineConfig cfg;
  const std::string content = detail::read_file(path);
  std::size_t begin = 0;
  std::size_t line_no = 0;
  while (begin <= content.size()) {
    std::size_t end = content.find('\n', begin);
    std::string line = content.substr(
        begin, end == std::string::npos ? std::string::npos : end - begin);
    begin = end == std::string::npos ? content.size() + 1 : end + 1;
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim_copy(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + " line " + std::to_string(line_no) +
                       ": expected key = value");
    }
    apply_config_override(cfg, detail::trim_copy(line.substr(0, eq)),
                          detail::trim_copy(line.substr(eq + 1)));
  }
  return cfg;
}

// Canonical artifact locations for one granularity.
inline std::string model_file_path(const PipelineConfig& cfg, std::size_t k) {
  return (std::filesystem::path(cfg.models_dir) /
          ("model" + std::to_string(k) + ".bin"))
      .string();
}

inline std::string vocab_file_path(const PipelineConfig& cfg, std::size_t k) {
  return (std::filesystem::path(cfg.models_dir) /
          ("vocab" + std::to_string(k) + ".txt"))
      .string();
}

inline std::string history_file_path(const PipelineConfig& cfg,
                                     std::size_t k) {
  return (std::filesystem::path(cfg.models_dir) /
          ("history" + std::to_string(k) + ".txt"))
      .string();
}

}  // namespace sentiscore
