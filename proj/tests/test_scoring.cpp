#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "sentiscore/analysis.hpp"
#include "sentiscore/corpus.hpp"
#include "sentiscore/model.hpp"
#include "sentiscore/reports.hpp"
#include "sentiscore/scoring.hpp"

using namespace sentiscore;

namespace {

struct Fixture {
  Vocabulary vocab;
  ModelParameters model10;
  ModelParameters model5;

  Fixture() {
    Corpus corpus;
    corpus.reviews.push_back(
        {"r1", "good bad plain fine dull great poor flat", 5});
    vocab = build_vocab(corpus, 16);

    ModelConfig config;
    config.vocab_top_n = 16;
    config.doc_length = 8;
    config.embed_dim = 4;
    config.filters = 3;
    config.kernel_width = 2;
    config.hidden_dim = 4;
    config.num_classes = 10;
    config.seed = 31;
    model10 = build_model(config, vocab);
    config.num_classes = 5;
    config.seed = 32;
    model5 = build_model(config, vocab);
  }

  // rig a model so it always predicts the given class
  static void force_constant(ModelParameters& m, int klass) {
    m.conv_kernels.fill(0.0);
    m.conv_bias.fill(0.0);
    m.hidden_weight.fill(0.0);
    m.hidden_bias.fill(0.0);
    m.output_weight.fill(0.0);
    m.output_bias.fill(0.0);
    m.output_bias.at(static_cast<std::size_t>(klass - 1)) = 5.0;
  }

  static ParticipantRecord participant(const std::string& id,
                                       const std::string& summary) {
    ParticipantRecord p;
    p.id = id;
    p.cesd = 20;
    p.panas_positive = 30;
    p.panas_negative = 30;
    p.summary = summary;
    return p;
  }
};

}  // namespace

TEST_CASE_METHOD(Fixture, "one-sentence summaries have a one-element mean") {
  ParticipantRecord p = participant("p1", "good great fine.");
  ScoreReport r = score_summary(model10, vocab, model5, vocab, p);
  REQUIRE(r.sentence_scores_10.size() == 1);
  REQUIRE(r.sentence_scores_5.size() == 1);
  CHECK(r.sen1to10 == static_cast<double>(r.sentence_scores_10[0]));
  CHECK(r.sen1to5 == static_cast<double>(r.sentence_scores_5[0]));
  // the whole summary and its only sentence tokenize identically
  CHECK(r.para1to10 == r.sentence_scores_10[0]);
  CHECK(r.para1to5 == r.sentence_scores_5[0]);
}

TEST_CASE_METHOD(Fixture, "a constant model scores everything the same") {
  force_constant(model10, 1);
  force_constant(model5, 1);
  ParticipantRecord p = participant("p1", "good bad. plain fine. dull!");
  ScoreReport r = score_summary(model10, vocab, model5, vocab, p);
  CHECK(r.para1to10 == 1);
  CHECK(r.para1to5 == 1);
  CHECK(r.sen1to10 == 1.0);
  CHECK(r.sen1to5 == 1.0);
  CHECK(r.sentence_scores_10 == std::vector<int>{1, 1, 1});
}

TEST_CASE_METHOD(Fixture, "sentence means stay within their score hull") {
  std::vector<ParticipantRecord> ps;
  const char* summaries[] = {
      "good great. bad awful. plain!",
      "fine fine fine. dull dull.",
      "poor flat bad? great good.",
  };
  for (int i = 0; i < 3; ++i) {
    ps.push_back(participant("p" + std::to_string(i), summaries[i]));
  }
  ScoringOutcome out = score_all(model10, vocab, model5, vocab, ps);
  REQUIRE(out.reports.size() == 3);
  CHECK(out.failures.empty());
  for (const ScoreReport& r : out.reports) {
    int lo10 = 10, hi10 = 1;
    for (int s : r.sentence_scores_10) {
      lo10 = std::min(lo10, s);
      hi10 = std::max(hi10, s);
    }
    CHECK(r.sen1to10 >= lo10);
    CHECK(r.sen1to10 <= hi10);
    CHECK(r.sen1to10 >= 1.0);
    CHECK(r.sen1to10 <= 10.0);
    CHECK(r.sen1to5 >= 1.0);
    CHECK(r.sen1to5 <= 5.0);
  }

  // deterministic: same inputs, same reports
  ScoringOutcome again = score_all(model10, vocab, model5, vocab, ps);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(again.reports[i].para1to10 == out.reports[i].para1to10);
    CHECK(again.reports[i].sen1to10 == out.reports[i].sen1to10);
    CHECK(again.reports[i].sentence_scores_5 ==
          out.reports[i].sentence_scores_5);
  }
}

TEST_CASE_METHOD(Fixture, "score_all isolates failures per participant") {
  std::vector<ParticipantRecord> ps;
  ps.push_back(participant("ok1", "good great."));
  ParticipantRecord broken = participant("broken", "placeholder");
  broken.summary = "   ";  // no sentences survive
  ps.push_back(broken);
  ps.push_back(participant("ok2", "bad awful."));

  ScoringOutcome out = score_all(model10, vocab, model5, vocab, ps);
  REQUIRE(out.reports.size() == 2);
  CHECK(out.reports[0].participant_id == "ok1");
  CHECK(out.reports[1].participant_id == "ok2");
  REQUIRE(out.failures.size() == 1);
  CHECK(out.failures[0].participant_id == "broken");

  CHECK(score_all(model10, vocab, model5, vocab, {}).reports.empty());

  // mismatched class counts are rejected outright
  CHECK_THROWS_AS(
      score_summary(model5, vocab, model5, vocab, ps[0]), ShapeError);
}

TEST_CASE_METHOD(Fixture, "score distributions count and normalize") {
  force_constant(model10, 7);
  force_constant(model5, 5);
  std::vector<ParticipantRecord> ps;
  ps.push_back(participant("p1", "one. two. three."));
  ps.push_back(participant("p2", "four. five."));
  ScoringOutcome out = score_all(model10, vocab, model5, vocab, ps);

  std::vector<HistogramBin> para5 =
      score_distribution(out.reports, ScoreApproach::para1to5);
  REQUIRE(para5.size() == 5);
  CHECK(para5[4].score == 5);
  CHECK(para5[4].count == 2);
  CHECK(para5[4].percent == 100.0);

  std::vector<HistogramBin> sen10 =
      score_distribution(out.reports, ScoreApproach::sen1to10);
  std::size_t total = 0;
  double pct = 0.0;
  for (const HistogramBin& bin : sen10) {
    total += bin.count;
    pct += bin.percent;
  }
  CHECK(total == 5);  // three + two sentences pooled
  CHECK(pct == Catch::Approx(100.0).margin(0.01));

  CHECK_THROWS_AS(score_distribution({}, ScoreApproach::para1to10),
                  EmptyInputError);
}

TEST_CASE_METHOD(Fixture, "compare_groups runs both tests over a field") {
  force_constant(model10, 1);
  force_constant(model5, 1);
  std::vector<ParticipantRecord> group_a;
  std::vector<ParticipantRecord> group_b;
  std::vector<ParticipantRecord> all;
  for (int i = 0; i < 4; ++i) {
    ParticipantRecord p = participant("a" + std::to_string(i), "one. two.");
    group_a.push_back(p);
    all.push_back(p);
  }
  for (int i = 0; i < 4; ++i) {
    ParticipantRecord p = participant("b" + std::to_string(i), "one. two.");
    group_b.push_back(p);
    all.push_back(p);
  }
  ScoringOutcome out = score_all(model10, vocab, model5, vocab, all);

  // identical constant scores: zero variance in both groups
  CHECK_THROWS_AS(compare_groups(out.reports, group_a, group_b,
                                 ScoreApproach::para1to10),
                  DegenerateVarianceError);

  CHECK_THROWS_AS(
      compare_groups(out.reports, {group_a[0]}, group_b,
                     ScoreApproach::sen1to10),
      InsufficientDataError);
}

TEST_CASE_METHOD(Fixture, "analyze_reports produces a cell per grouping and field") {
  std::vector<ParticipantRecord> ps;
  const char* texts[] = {"good great. fine!", "bad awful.", "plain dull. flat.",
                         "great good fine.", "poor bad!", "dull flat plain.",
                         "good plain bad.", "fine dull poor."};
  for (int i = 0; i < 8; ++i) {
    ParticipantRecord p = participant("p" + std::to_string(i), texts[i]);
    p.cesd = i < 4 ? 30 : 10;             // two CES-D groups of four
    p.panas_positive = 20 + 2 * i;        // combined straddles 62
    p.panas_negative = 30;
    ps.push_back(p);
  }
  ScoringOutcome out = score_all(model10, vocab, model5, vocab, ps);
  std::vector<AnalysisCell> cells =
      analyze_reports(out.reports, ps, 21, 61.890);
  REQUIRE(cells.size() == 8);
  for (const AnalysisCell& cell : cells) {
    CHECK((cell.grouping == "cesd" || cell.grouping == "panas"));
    if (cell.ok) {
      CHECK(cell.comparison.a.n + cell.comparison.b.n == 8);
      CHECK(cell.comparison.pooled.p >= 0.0);
      CHECK(cell.comparison.pooled.p <= 1.0);
      CHECK(cell.comparison.welch.p >= 0.0);
      CHECK(cell.comparison.welch.p <= 1.0);
    } else {
      CHECK(!cell.error.empty());
    }
  }
}

TEST_CASE_METHOD(Fixture, "score reports survive the JSON round trip") {
  std::vector<ParticipantRecord> ps;
  ps.push_back(participant("p1", "good great. bad!"));
  ps.push_back(participant("p2", "plain dull."));
  ScoringOutcome out = score_all(model10, vocab, model5, vocab, ps);

  Json doc = scoring_outcome_to_json(out);
  std::vector<ScoreReport> reloaded =
      score_reports_from_json(Json::parse(doc.dump()));
  REQUIRE(reloaded.size() == out.reports.size());
  for (std::size_t i = 0; i < reloaded.size(); ++i) {
    CHECK(reloaded[i].participant_id == out.reports[i].participant_id);
    CHECK(reloaded[i].para1to10 == out.reports[i].para1to10);
    CHECK(reloaded[i].sen1to10 == out.reports[i].sen1to10);
    CHECK(reloaded[i].sentence_scores_10 == out.reports[i].sentence_scores_10);
  }

  const std::string csv = score_reports_to_csv(out.reports);
  CHECK(csv.find("id,para1to10,para1to5,sen1to10,sen1to5,sentences") == 0);
  CHECK(csv.find("p1,") != std::string::npos);

  CHECK_THROWS_AS(score_reports_from_json(Json::object()), FormatError);
}
