#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "sentiscore/corpus.hpp"
#include "sentiscore/error.hpp"
#include "sentiscore/scoring.hpp"
#include "sentiscore/stats.hpp"

namespace sentiscore {

inline double score_field_value(const ScoreReport& report,
                                ScoreApproach field) {
  switch (field) {
    case ScoreApproach::para1to10:
      return report.para1to10;
    case ScoreApproach::para1to5:
      return report.para1to5;
    case ScoreApproach::sen1to10:
      return report.sen1to10;
    case ScoreApproach::sen1to5:
      return report.sen1to5;
  }
  throw RangeError("unknown score field");
}

// Both the pooled and the Welch test over one score field across a
// two-group participant partition. Participants without a report (scoring
// failures) are skipped.
inline GroupComparison compare_groups(
    const std::vector<ScoreReport>& reports,
    const std::vector<ParticipantRecord>& group_a,
    const std::vector<ParticipantRecord>& group_b, ScoreApproach field) {
  std::unordered_map<std::string, const ScoreReport*> by_id;
  for (const ScoreReport& r : reports) by_id[r.participant_id] = &r;

  const auto collect = [&](const std::vector<ParticipantRecord>& group) {
    std::vector<double> values;
    for (const ParticipantRecord& p : group) {
      auto it = by_id.find(p.id);
      if (it != by_id.end()) {
        values.push_back(score_field_value(*it->second, field));
      }
    }
    return values;
  };

  const std::vector<double> a = collect(group_a);
  const std::vector<double> b = collect(group_b);
  if (a.size() < 2 || b.size() < 2) {
    throw InsufficientDataError(
        "group comparison needs at least 2 scored participants per group");
  }
  return compare_group_samples(a, b);
}

// One row of the analysis table: a grouping crossed with a score field.
struct AnalysisCell {
  std::string grouping;
  std::string label_a;
  std::string label_b;
  std::string field;
  bool ok = false;
  std::string error;
  GroupComparison comparison;
};

// Runs the CES-D and PANAS splits over all four score fields. Cells that
// cannot be computed (tiny group, zero variance) carry their error message
// instead of aborting the run.
inline std::vector<AnalysisCell> analyze_reports(
    const std::vector<ScoreReport>& reports,
    const std::vector<ParticipantRecord>& participants, int cesd_cutoff,
    double panas_threshold) {
  struct Grouping {
    std::string name;
    std::string label_a;
    std::string label_b;
    ParticipantSplit split;
  };
  std::vector<Grouping> groupings;
  groupings.push_back({"cesd", "depressed", "non_depressed",
                       split_by_cesd(participants, cesd_cutoff)});
  groupings.push_back({"panas", "higher_panas", "lower_panas",
                       split_by_panas(participants, panas_threshold)});

  const ScoreApproach fields[] = {
      ScoreApproach::para1to10, ScoreApproach::para1to5,
      ScoreApproach::sen1to10, ScoreApproach::sen1to5};

  std::vector<AnalysisCell> cells;
  for (const Grouping& g : groupings) {
    for (ScoreApproach field : fields) {
      AnalysisCell cell;
      cell.grouping = g.name;
      cell.label_a = g.label_a;
      cell.label_b = g.label_b;
      cell.field = score_approach_name(field);
      try {
        cell.comparison =
            compare_groups(reports, g.split.first, g.split.second, field);
        cell.ok = true;
      } catch (const Error& e) {
        cell.error = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace sentiscore
