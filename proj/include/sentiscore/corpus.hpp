#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sentiscore/csv.hpp"
#include "sentiscore/error.hpp"
#include "sentiscore/lexicon.hpp"
#include "sentiscore/rng.hpp"

namespace sentiscore {

enum class Granularity { ten, five, three };

inline int class_count(Granularity g) {
  switch (g) {
    case Granularity::ten:
      return 10;
    case Granularity::five:
      return 5;
    case Granularity::three:
      return 3;
  }
  throw RangeError("unknown granularity");
}

struct Review {
  std::string id;
  std::string text;
  int score = 0;
};

struct Corpus {
  std::vector<Review> reviews;
  Granularity granularity = Granularity::ten;

  bool empty() const { return reviews.empty(); }
  std::size_t size() const { return reviews.size(); }
};

struct SplitSpec {
  double train_ratio = 0.7;
  double val_ratio = 0.15;
  double test_ratio = 0.15;
  std::uint64_t seed = 0;
};

struct ParticipantRecord {
  std::string id;
  int cesd = 0;
  int panas_positive = 10;
  int panas_negative = 10;
  int lot = 0;
  int cses = 0;
  int ss = 0;
  std::string summary;
};

namespace detail {

inline std::string trim_copy(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n\v\f");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n\v\f");
  return s.substr(b, e - b + 1);
}

inline int parse_int(const std::string& s, const std::string& context) {
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw ParseError(context + ": not an integer: '" + s + "'");
  }
  if (pos != s.size()) {
    throw ParseError(context + ": not an integer: '" + s + "'");
  }
  return value;
}

// Review text travels on a single TSV line; tab, newline, carriage return
// and backslash are escaped so the round trip is byte-exact.
inline std::string escape_review_text(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        out += c;
        break;
    }
  }
  return out;
}

inline std::string unescape_review_text(const std::string& text,
                                        const std::string& context) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '\\') {
      out += c;
      continue;
    }
    if (i + 1 >= text.size()) {
      throw ParseError(context + ": dangling escape at end of text");
    }
    char next = text[++i];
    switch (next) {
      case '\\':
        out += '\\';
        break;
      case 't':
        out += '\t';
        break;
      case 'n':
        out += '\n';
        break;
      case 'r':
        out += '\r';
        break;
      default:
        throw ParseError(context + ": unknown escape '\\" +
                         std::string(1, next) + "'");
    }
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write file: " + path);
  }
  out << content;
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Review TSV: one record per line, "id<TAB>score<TAB>text", UTF-8, LF.

inline Corpus corpus_from_tsv(const std::string& content,
                              const std::string& source_name) {
  Corpus corpus;
  std::unordered_set<std::string> seen_ids;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin < content.size()) {
    std::size_t end = content.find('\n', begin);
    std::string line = content.substr(
        begin, end == std::string::npos ? std::string::npos : end - begin);
    begin = end == std::string::npos ? content.size() : end + 1;
    ++line_no;
    if (line.empty()) continue;
    std::string context = source_name + " line " + std::to_string(line_no);

    std::size_t tab1 = line.find('\t');
    std::size_t tab2 =
        tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos) {
      throw ParseError(context + ": expected id<TAB>score<TAB>text");
    }
    Review review;
    review.id = line.substr(0, tab1);
    std::string score_field = line.substr(tab1 + 1, tab2 - tab1 - 1);
    review.score = detail::parse_int(score_field, context);
    if (review.score < 1 || review.score > 10) {
      throw RangeError(context + ": score out of range 1..10: " + score_field);
    }
    review.text = detail::unescape_review_text(line.substr(tab2 + 1), context);
    if (detail::trim_copy(review.text).empty()) {
      throw ParseError(context + ": empty review text");
    }
    if (!seen_ids.insert(review.id).second) {
      throw ParseError(context + ": duplicate review id '" + review.id + "'");
    }
    corpus.reviews.push_back(std::move(review));
  }
  return corpus;
}

inline std::string corpus_to_tsv(const Corpus& corpus) {
  std::string out;
  for (const Review& r : corpus.reviews) {
    out += r.id;
    out += '\t';
    out += std::to_string(r.score);
    out += '\t';
    out += detail::escape_review_text(r.text);
    out += '\n';
  }
  return out;
}

inline Corpus load_reviews(const std::string& path) {
  return corpus_from_tsv(detail::read_file(path), path);
}

inline void save_reviews(const Corpus& corpus, const std::string& path) {
  detail::write_file(path, corpus_to_tsv(corpus));
}

// ---------------------------------------------------------------------------
// Splitting and label coarsening.

inline void validate_split_spec(const SplitSpec& spec) {
  if (spec.train_ratio < 0 || spec.val_ratio < 0 || spec.test_ratio < 0) {
    throw RangeError("split ratios must be non-negative");
  }
  double sum = spec.train_ratio + spec.val_ratio + spec.test_ratio;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw RangeError("split ratios must sum to 1");
  }
}

struct CorpusSplit {
  Corpus train;
  Corpus val;
  Corpus test;
};

// Seeded Fisher-Yates shuffle of indices, then floor(train), floor(val),
// remainder to test.
inline CorpusSplit split_corpus(const Corpus& corpus, const SplitSpec& spec) {
  validate_split_spec(spec);
  if (corpus.empty()) {
    throw EmptyInputError("cannot split an empty corpus");
  }
  std::size_t n = corpus.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  shuffle_in_place(order, rng);

  auto train_n = static_cast<std::size_t>(
      std::floor(spec.train_ratio * static_cast<double>(n)));
  auto val_n = static_cast<std::size_t>(
      std::floor(spec.val_ratio * static_cast<double>(n)));

  CorpusSplit split;
  split.train.granularity = corpus.granularity;
  split.val.granularity = corpus.granularity;
  split.test.granularity = corpus.granularity;
  for (std::size_t i = 0; i < n; ++i) {
    const Review& r = corpus.reviews[order[i]];
    if (i < train_n) {
      split.train.reviews.push_back(r);
    } else if (i < train_n + val_n) {
      split.val.reviews.push_back(r);
    } else {
      split.test.reviews.push_back(r);
    }
  }
  return split;
}

// Map a 1..10 score onto the coarser scales: pairs for five-level,
// low/mid/high buckets for three-level.
inline int coarsen_label(int score10, Granularity granularity) {
  if (score10 < 1 || score10 > 10) {
    throw RangeError("score out of range 1..10: " + std::to_string(score10));
  }
  switch (granularity) {
    case Granularity::ten:
      return score10;
    case Granularity::five:
      return (score10 + 1) / 2;
    case Granularity::three:
      if (score10 <= 3) return 1;
      if (score10 <= 7) return 2;
      return 3;
  }
  throw RangeError("unknown granularity");
}

inline Corpus coarsen_corpus(const Corpus& corpus, Granularity granularity) {
  Corpus out;
  out.granularity = granularity;
  out.reviews.reserve(corpus.size());
  for (const Review& r : corpus.reviews) {
    out.reviews.push_back({r.id, r.text, coarsen_label(r.score, granularity)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpus generation.

// Hamilton / largest-remainder apportionment: every count is within one of
// its exact quota n*w_i/sum(w).
inline std::array<std::size_t, 10> largest_remainder_allocation(
    std::size_t n, const std::array<double, 10>& weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw RangeError("distribution weights must be finite and >= 0");
    }
    total += w;
  }
  if (total <= 0.0) {
    throw DataError("invalid distribution: all weights are zero");
  }
  std::array<std::size_t, 10> counts{};
  std::array<double, 10> fractions{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    double quota = static_cast<double>(n) * weights[i] / total;
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    fractions[i] = quota - std::floor(quota);
    assigned += counts[i];
  }
  std::array<std::size_t, 10> by_fraction{};
  std::iota(by_fraction.begin(), by_fraction.end(), 0);
  std::stable_sort(by_fraction.begin(), by_fraction.end(),
                   [&](std::size_t a, std::size_t b) {
                     return fractions[a] > fractions[b];
                   });
  for (std::size_t i = 0; assigned < n; ++i) {
    ++counts[by_fraction[i % 10]];
    ++assigned;
  }
  return counts;
}

namespace detail {

// Per-token category weights for a given score: the sentiment share splits
// between the positive and negative lexica linearly in the score, the rest
// is neutral filler. Within a polarity most draws come from the intensity
// window matching the score, so every class stays learnable.
inline constexpr double kSentimentShare = 0.65;
inline constexpr double kWindowShare = 0.75;

inline std::string sample_review_token(Rng& rng, int score) {
  using namespace lexicon;
  double pos_w = kSentimentShare * static_cast<double>(score - 1) / 9.0;
  double neg_w = kSentimentShare * static_cast<double>(10 - score) / 9.0;
  double r = uniform_real01(rng);
  if (r < pos_w) {
    if (uniform_real01(rng) < kWindowShare) {
      return std::string(
          kPositiveWindows[score - 2][uniform_index(rng, kWindowSize)]);
    }
    return std::string(kPositiveCommon[uniform_index(rng, kPositiveCommon.size())]);
  }
  if (r < pos_w + neg_w) {
    if (uniform_real01(rng) < kWindowShare) {
      return std::string(
          kNegativeWindows[score - 1][uniform_index(rng, kWindowSize)]);
    }
    return std::string(kNegativeCommon[uniform_index(rng, kNegativeCommon.size())]);
  }
  return std::string(kFiller[uniform_index(rng, kFiller.size())]);
}

inline std::string sample_review_text(Rng& rng, int score) {
  std::size_t token_count = 8 + uniform_index(rng, 33);  // uniform 8..40
  std::string text;
  for (std::size_t i = 0; i < token_count; ++i) {
    if (i > 0) text += ' ';
    text += sample_review_token(rng, score);
  }
  return text;
}

}  // namespace detail

inline Corpus gen_synthetic_corpus(std::size_t n,
                                   const std::array<double, 10>& weights,
                                   std::uint64_t lexicon_seed) {
  std::array<std::size_t, 10> counts = largest_remainder_allocation(n, weights);
  std::vector<int> scores;
  scores.reserve(n);
  for (int cls = 0; cls < 10; ++cls) {
    scores.insert(scores.end(), counts[cls], cls + 1);
  }
  Rng rng(lexicon_seed);
  shuffle_in_place(scores, rng);

  Corpus corpus;
  corpus.reviews.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Review r;
    r.id = "s" + std::to_string(i + 1);
    r.score = scores[i];
    r.text = detail::sample_review_text(rng, r.score);
    corpus.reviews.push_back(std::move(r));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Participant records (CSV with header, RFC-4180).

inline std::vector<ParticipantRecord> participants_from_csv(
    const std::string& content, const std::string& source_name) {
  std::vector<CsvRow> rows = csv_parse(content);
  if (rows.empty()) {
    throw SchemaError(source_name + ": missing header row");
  }
  static const std::array<std::string, 8> required = {
      "id",  "cesd", "panas_positive", "panas_negative",
      "lot", "cses", "ss",             "summary"};
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    col[detail::trim_copy(rows[0][i])] = i;
  }
  for (const std::string& name : required) {
    if (!col.count(name)) {
      throw SchemaError(source_name + ": missing column '" + name + "'");
    }
  }

  auto check_range = [](int value, int lo, int hi, const std::string& what,
                        const std::string& context) {
    if (value < lo || value > hi) {
      throw RangeError(context + ": " + what + " out of range " +
                       std::to_string(lo) + ".." + std::to_string(hi) + ": " +
                       std::to_string(value));
    }
  };

  std::vector<ParticipantRecord> records;
  std::unordered_set<std::string> seen_ids;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const CsvRow& row = rows[i];
    std::string context = source_name + " record " + std::to_string(i);
    if (row.size() != rows[0].size()) {
      throw ParseError(context + ": expected " +
                       std::to_string(rows[0].size()) + " fields, got " +
                       std::to_string(row.size()));
    }
    ParticipantRecord rec;
    rec.id = row[col.at("id")];
    rec.cesd = detail::parse_int(row[col.at("cesd")], context + " cesd");
    rec.panas_positive =
        detail::parse_int(row[col.at("panas_positive")], context + " panas_positive");
    rec.panas_negative =
        detail::parse_int(row[col.at("panas_negative")], context + " panas_negative");
    rec.lot = detail::parse_int(row[col.at("lot")], context + " lot");
    rec.cses = detail::parse_int(row[col.at("cses")], context + " cses");
    rec.ss = detail::parse_int(row[col.at("ss")], context + " ss");
    rec.summary = row[col.at("summary")];

    check_range(rec.cesd, 0, 60, "cesd", context);
    check_range(rec.panas_positive, 10, 50, "panas_positive", context);
    check_range(rec.panas_negative, 10, 50, "panas_negative", context);
    if (detail::trim_copy(rec.summary).empty()) {
      throw ParseError(context + ": empty summary");
    }
    if (!seen_ids.insert(rec.id).second) {
      throw ParseError(context + ": duplicate participant id '" + rec.id + "'");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::vector<ParticipantRecord> load_participants(
    const std::string& path) {
  return participants_from_csv(detail::read_file(path), path);
}

}  // namespace sentiscore
