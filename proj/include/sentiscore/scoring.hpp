#pragma once

#include <map>
#include <string>
#include <vector>

#include "sentiscore/corpus.hpp"
#include "sentiscore/error.hpp"
#include "sentiscore/model.hpp"
#include "sentiscore/text.hpp"

namespace sentiscore {

// One participant's summary scored under the four approaches: whole summary
// at 10 and 5 levels, and per-sentence at 10 and 5 levels with their means.
struct ScoreReport {
  std::string participant_id;
  int para1to10 = 0;
  int para1to5 = 0;
  double sen1to10 = 0.0;
  double sen1to5 = 0.0;
  std::vector<int> sentence_scores_10;
  std::vector<int> sentence_scores_5;
};

enum class ScoreApproach { para1to10, para1to5, sen1to10, sen1to5 };

inline const char* score_approach_name(ScoreApproach approach) {
  switch (approach) {
    case ScoreApproach::para1to10:
      return "para1to10";
    case ScoreApproach::para1to5:
      return "para1to5";
    case ScoreApproach::sen1to10:
      return "sen1to10";
    case ScoreApproach::sen1to5:
      return "sen1to5";
  }
  throw RangeError("unknown scoring approach");
}

inline ScoreReport score_summary(const ModelParameters& model10,
                                 const Vocabulary& vocab10,
                                 const ModelParameters& model5,
                                 const Vocabulary& vocab5,
                                 const ParticipantRecord& participant) {
  if (model10.config.num_classes != 10 || model5.config.num_classes != 5) {
    throw ShapeError("scoring needs one 10-class and one 5-class model");
  }
  std::vector<std::string> sentences = split_sentences(participant.summary);
  if (sentences.empty()) {
    throw EmptyInputError("participant '" + participant.id +
                          "' has a summary with no sentences");
  }

  ScoreReport report;
  report.participant_id = participant.id;

  const std::vector<std::string> all_tokens = tokenize(participant.summary);
  report.para1to10 =
      predict(model10, encode(all_tokens, vocab10, model10.config.doc_length))
          .predicted_class;
  report.para1to5 =
      predict(model5, encode(all_tokens, vocab5, model5.config.doc_length))
          .predicted_class;

  double sum10 = 0.0;
  double sum5 = 0.0;
  for (const std::string& sentence : sentences) {
    const std::vector<std::string> tokens = tokenize(sentence);
    const int s10 =
        predict(model10, encode(tokens, vocab10, model10.config.doc_length))
            .predicted_class;
    const int s5 =
        predict(model5, encode(tokens, vocab5, model5.config.doc_length))
            .predicted_class;
    report.sentence_scores_10.push_back(s10);
    report.sentence_scores_5.push_back(s5);
    sum10 += s10;
    sum5 += s5;
  }
  report.sen1to10 = sum10 / static_cast<double>(sentences.size());
  report.sen1to5 = sum5 / static_cast<double>(sentences.size());
  return report;
}

// Batch scoring with per-record isolation: a participant that cannot be
// scored becomes a failure entry instead of aborting the rest.
struct ScoringOutcome {
  struct Failure {
    std::string participant_id;
    std::string message;
  };
  std::vector<ScoreReport> reports;
  std::vector<Failure> failures;
};

inline ScoringOutcome score_all(
    const ModelParameters& model10, const Vocabulary& vocab10,
    const ModelParameters& model5, const Vocabulary& vocab5,
    const std::vector<ParticipantRecord>& participants) {
  ScoringOutcome outcome;
  for (const ParticipantRecord& p : participants) {
    try {
      outcome.reports.push_back(
          score_summary(model10, vocab10, model5, vocab5, p));
    } catch (const Error& e) {
      outcome.failures.push_back({p.id, e.what()});
    }
  }
  return outcome;
}

// Histogram of scores under one approach; sentence approaches pool the
// per-sentence scores of every report.
struct HistogramBin {
  int score = 0;
  std::size_t count = 0;
  double percent = 0.0;
};

inline std::vector<HistogramBin> score_distribution(
    const std::vector<ScoreReport>& reports, ScoreApproach approach) {
  if (reports.empty()) {
    throw EmptyInputError("score distribution over no reports");
  }
  const int max_score =
      (approach == ScoreApproach::para1to10 || approach == ScoreApproach::sen1to10)
          ? 10
          : 5;
  std::map<int, std::size_t> counts;
  for (int s = 1; s <= max_score; ++s) counts[s] = 0;
  std::size_t total = 0;
  for (const ScoreReport& r : reports) {
    switch (approach) {
      case ScoreApproach::para1to10:
        ++counts[r.para1to10];
        ++total;
        break;
      case ScoreApproach::para1to5:
        ++counts[r.para1to5];
        ++total;
        break;
      case ScoreApproach::sen1to10:
        for (int s : r.sentence_scores_10) {
          ++counts[s];
          ++total;
        }
        break;
      case ScoreApproach::sen1to5:
        for (int s : r.sentence_scores_5) {
          ++counts[s];
          ++total;
        }
        break;
    }
  }
  std::vector<HistogramBin> bins;
  bins.reserve(counts.size());
  for (const auto& [score, count] : counts) {
    HistogramBin bin;
    bin.score = score;
    bin.count = count;
    bin.percent = 100.0 * static_cast<double>(count) / static_cast<double>(total);
    bins.push_back(bin);
  }
  return bins;
}

}  // namespace sentiscore
