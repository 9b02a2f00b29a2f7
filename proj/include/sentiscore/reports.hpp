#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sentiscore/analysis.hpp"
#include "sentiscore/csv.hpp"
#include "sentiscore/error.hpp"
#include "sentiscore/scoring.hpp"
#include "sentiscore/stats.hpp"

namespace sentiscore {

using Json = nlohmann::json;

// Shortest round-trip representation; keeps CSV numbers exact and
// byte-stable across runs.
inline std::string format_double(double v) { return Json(v).dump(); }

// ---------------------------------------------------------------------------
// Score reports.

inline std::string score_reports_to_csv(const std::vector<ScoreReport>& reports) {
  std::string out = csv_format_row(
      {"id", "para1to10", "para1to5", "sen1to10", "sen1to5", "sentences"});
  for (const ScoreReport& r : reports) {
    out += csv_format_row({r.participant_id, std::to_string(r.para1to10),
                           std::to_string(r.para1to5), format_double(r.sen1to10),
                           format_double(r.sen1to5),
                           std::to_string(r.sentence_scores_10.size())});
  }
  return out;
}

inline Json score_report_to_json(const ScoreReport& r) {
  return Json{{"id", r.participant_id},
              {"para1to10", r.para1to10},
              {"para1to5", r.para1to5},
              {"sen1to10", r.sen1to10},
              {"sen1to5", r.sen1to5},
              {"sentence_scores_10", r.sentence_scores_10},
              {"sentence_scores_5", r.sentence_scores_5}};
}

inline Json scoring_outcome_to_json(const ScoringOutcome& outcome) {
  Json reports = Json::array();
  for (const ScoreReport& r : outcome.reports) {
    reports.push_back(score_report_to_json(r));
  }
  Json failures = Json::array();
  for (const ScoringOutcome::Failure& f : outcome.failures) {
    failures.push_back(Json{{"id", f.participant_id}, {"error", f.message}});
  }
  return Json{{"reports", reports}, {"failures", failures}};
}

inline std::vector<ScoreReport> score_reports_from_json(const Json& doc) {
  if (!doc.contains("reports") || !doc["reports"].is_array()) {
    throw FormatError("score report JSON is missing the 'reports' array");
  }
  std::vector<ScoreReport> reports;
  try {
    for (const Json& j : doc["reports"]) {
      ScoreReport r;
      r.participant_id = j.at("id").get<std::string>();
      r.para1to10 = j.at("para1to10").get<int>();
      r.para1to5 = j.at("para1to5").get<int>();
      r.sen1to10 = j.at("sen1to10").get<double>();
      r.sen1to5 = j.at("sen1to5").get<double>();
      r.sentence_scores_10 = j.at("sentence_scores_10").get<std::vector<int>>();
      r.sentence_scores_5 = j.at("sentence_scores_5").get<std::vector<int>>();
      reports.push_back(std::move(r));
    }
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed score report JSON: ") + e.what());
  }
  return reports;
}

inline Json distributions_to_json(const std::vector<ScoreReport>& reports) {
  Json out = Json::object();
  const ScoreApproach approaches[] = {
      ScoreApproach::para1to10, ScoreApproach::para1to5,
      ScoreApproach::sen1to10, ScoreApproach::sen1to5};
  for (ScoreApproach approach : approaches) {
    Json bins = Json::array();
    for (const HistogramBin& bin : score_distribution(reports, approach)) {
      bins.push_back(Json{{"score", bin.score},
                          {"count", bin.count},
                          {"percent", bin.percent}});
    }
    out[score_approach_name(approach)] = bins;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Analysis tables.

inline Json sample_summary_to_json(const SampleSummary& s) {
  return Json{{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}};
}

inline Json test_result_to_json(const TestResult& r) {
  return Json{{"t", r.t}, {"df", r.df}, {"p", r.p}};
}

inline Json analysis_to_json(const std::vector<AnalysisCell>& cells) {
  Json rows = Json::array();
  for (const AnalysisCell& cell : cells) {
    Json row{{"grouping", cell.grouping},
             {"field", cell.field},
             {"label_a", cell.label_a},
             {"label_b", cell.label_b},
             {"ok", cell.ok}};
    if (cell.ok) {
      row["a"] = sample_summary_to_json(cell.comparison.a);
      row["b"] = sample_summary_to_json(cell.comparison.b);
      row["pooled"] = test_result_to_json(cell.comparison.pooled);
      row["welch"] = test_result_to_json(cell.comparison.welch);
    } else {
      row["error"] = cell.error;
    }
    rows.push_back(std::move(row));
  }
  return Json{{"cells", rows}};
}

inline std::string analysis_to_csv(const std::vector<AnalysisCell>& cells) {
  std::string out = csv_format_row(
      {"grouping", "field", "label_a", "n_a", "mean_a", "sd_a", "label_b",
       "n_b", "mean_b", "sd_b", "pooled_t", "pooled_df", "pooled_p", "welch_t",
       "welch_df", "welch_p", "error"});
  for (const AnalysisCell& cell : cells) {
    if (cell.ok) {
      const GroupComparison& c = cell.comparison;
      out += csv_format_row(
          {cell.grouping, cell.field, cell.label_a, std::to_string(c.a.n),
           format_double(c.a.mean), format_double(c.a.sd), cell.label_b,
           std::to_string(c.b.n), format_double(c.b.mean),
           format_double(c.b.sd), format_double(c.pooled.t),
           format_double(c.pooled.df), format_double(c.pooled.p),
           format_double(c.welch.t), format_double(c.welch.df),
           format_double(c.welch.p), ""});
    } else {
      out += csv_format_row({cell.grouping, cell.field, cell.label_a, "", "",
                             "", cell.label_b, "", "", "", "", "", "", "", "",
                             "", cell.error});
    }
  }
  return out;
}

}  // namespace sentiscore
