// Command-line driver for the sentiment scoring pipeline:
//   gen-corpus -> train -> eval / score -> analyze
// Logs go to stderr, data to files and stdout. Exit codes: 0 ok, 2 usage,
// 3 data error, 4 numeric error.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sentiscore/analysis.hpp"
#include "sentiscore/config.hpp"
#include "sentiscore/corpus.hpp"
#include "sentiscore/error.hpp"
#include "sentiscore/gradcheck.hpp"
#include "sentiscore/model.hpp"
#include "sentiscore/reports.hpp"
#include "sentiscore/scoring.hpp"
#include "sentiscore/stats.hpp"
#include "sentiscore/text.hpp"

namespace {

using sentiscore::PipelineConfig;
namespace fs = std::filesystem;

PipelineConfig resolve_config(const std::string& config_path,
                              const std::vector<std::string>& overrides) {
  PipelineConfig cfg;
  if (!config_path.empty()) {
    cfg = sentiscore::load_pipeline_config(config_path);
  }
  for (const std::string& kv : overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw sentiscore::UsageError("--set expects key=value, got '" + kv + "'");
    }
    sentiscore::apply_config_override(
        cfg, sentiscore::detail::trim_copy(kv.substr(0, eq)),
        sentiscore::detail::trim_copy(kv.substr(eq + 1)));
  }
  return cfg;
}

void ensure_parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }
}

sentiscore::Granularity granularity_from_k(std::size_t k) {
  switch (k) {
    case 10:
      return sentiscore::Granularity::ten;
    case 5:
      return sentiscore::Granularity::five;
    case 3:
      return sentiscore::Granularity::three;
    default:
      throw sentiscore::UsageError("granularity must be 10, 5 or 3");
  }
}

int cmd_gen_corpus(const PipelineConfig& cfg) {
  sentiscore::Corpus corpus = sentiscore::gen_synthetic_corpus(
      cfg.synth_reviews, cfg.synth_weights, cfg.synth_seed);
  ensure_parent_dir(cfg.corpus_path);
  sentiscore::save_reviews(corpus, cfg.corpus_path);
  std::cerr << "wrote " << corpus.size() << " reviews to " << cfg.corpus_path
            << "\n";
  std::vector<std::size_t> counts(10, 0);
  for (const sentiscore::Review& r : corpus.reviews) ++counts[r.score - 1];
  for (int s = 1; s <= 10; ++s) {
    const double pct =
        corpus.empty() ? 0.0
                       : 100.0 * static_cast<double>(counts[s - 1]) /
                             static_cast<double>(corpus.size());
    std::cout << "score " << s << "\t" << counts[s - 1] << "\t"
              << sentiscore::format_double(pct) << "\n";
  }
  return 0;
}

int cmd_train(const PipelineConfig& cfg, std::size_t k) {
  const sentiscore::Granularity g = granularity_from_k(k);
  sentiscore::Corpus corpus = sentiscore::load_reviews(cfg.corpus_path);
  sentiscore::CorpusSplit split = sentiscore::split_corpus(corpus, cfg.split);
  sentiscore::Vocabulary vocab =
      sentiscore::build_vocab(split.train, cfg.model.vocab_top_n);
  std::cerr << "split " << corpus.size() << " reviews into "
            << split.train.size() << "/" << split.val.size() << "/"
            << split.test.size() << ", vocabulary of " << vocab.size()
            << " entries\n";

  sentiscore::ModelConfig mc = cfg.model;
  mc.num_classes = k;
  sentiscore::ModelParameters initial = sentiscore::build_model(mc, vocab);
  auto [model, history] = sentiscore::train(
      initial, vocab, sentiscore::coarsen_corpus(split.train, g),
      sentiscore::coarsen_corpus(split.val, g),
      [](std::size_t epoch, const sentiscore::EpochStats& stats) {
        std::cerr << "epoch " << (epoch + 1) << ": train loss "
                  << stats.train_loss << ", val top-1 " << stats.val_top1
                  << "\n";
      });

  const std::string model_path = sentiscore::model_file_path(cfg, k);
  const std::string vocab_path = sentiscore::vocab_file_path(cfg, k);
  const std::string history_path = sentiscore::history_file_path(cfg, k);
  ensure_parent_dir(model_path);
  sentiscore::save_model(model, model_path);
  sentiscore::save_vocabulary(vocab, vocab_path);
  std::string lines;
  for (std::size_t e = 0; e < history.epochs.size(); ++e) {
    lines += std::to_string(e + 1);
    lines += '\t';
    lines += sentiscore::format_double(history.epochs[e].train_loss);
    lines += '\t';
    lines += sentiscore::format_double(history.epochs[e].val_top1);
    lines += '\n';
  }
  sentiscore::detail::write_file(history_path, lines);
  std::cerr << "saved " << model_path << " (best epoch "
            << (history.epochs.empty() ? 0 : history.best_epoch + 1) << ")\n";
  return 0;
}

int cmd_eval(const PipelineConfig& cfg, const std::string& model_path,
             std::string vocab_path, const std::vector<std::size_t>& ks) {
  sentiscore::ModelParameters model = sentiscore::load_model(model_path);
  const std::size_t k_classes = model.config.num_classes;
  for (std::size_t k : ks) {
    if (k < 1 || k > k_classes) {
      throw sentiscore::UsageError("requested top-" + std::to_string(k) +
                                   " on a " + std::to_string(k_classes) +
                                   "-class model");
    }
  }
  if (vocab_path.empty()) {
    vocab_path = sentiscore::vocab_file_path(cfg, k_classes);
  }
  sentiscore::Vocabulary vocab = sentiscore::load_vocabulary(vocab_path);
  sentiscore::Corpus corpus = sentiscore::load_reviews(cfg.corpus_path);
  sentiscore::CorpusSplit split = sentiscore::split_corpus(corpus, cfg.split);
  const sentiscore::Granularity g = granularity_from_k(k_classes);
  sentiscore::Corpus test = sentiscore::coarsen_corpus(split.test, g);

  std::vector<double> accuracies =
      sentiscore::evaluate_topk(model, vocab, test, ks);
  nlohmann::json out;
  out["model"] = model_path;
  out["test_size"] = test.size();
  nlohmann::json topk = nlohmann::json::object();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    std::cout << "top-" << ks[i] << " accuracy: "
              << sentiscore::format_double(accuracies[i]) << "\n";
    topk["top" + std::to_string(ks[i])] = accuracies[i];
  }
  out["topk"] = topk;
  if (k_classes == 10) {
    const double acc5 = sentiscore::evaluate_coarsened_top1(
        model, vocab, split.test, sentiscore::Granularity::five);
    const double acc3 = sentiscore::evaluate_coarsened_top1(
        model, vocab, split.test, sentiscore::Granularity::three);
    std::cout << "coarsened 5-level accuracy: "
              << sentiscore::format_double(acc5) << "\n";
    std::cout << "coarsened 3-level accuracy: "
              << sentiscore::format_double(acc3) << "\n";
    out["coarsened_top1"] = {{"five", acc5}, {"three", acc3}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_score(const PipelineConfig& cfg) {
  sentiscore::ModelParameters model10 =
      sentiscore::load_model(sentiscore::model_file_path(cfg, 10));
  sentiscore::Vocabulary vocab10 =
      sentiscore::load_vocabulary(sentiscore::vocab_file_path(cfg, 10));
  sentiscore::ModelParameters model5 =
      sentiscore::load_model(sentiscore::model_file_path(cfg, 5));
  sentiscore::Vocabulary vocab5 =
      sentiscore::load_vocabulary(sentiscore::vocab_file_path(cfg, 5));
  std::vector<sentiscore::ParticipantRecord> participants =
      sentiscore::load_participants(cfg.participants_path);

  sentiscore::ScoringOutcome outcome =
      sentiscore::score_all(model10, vocab10, model5, vocab5, participants);
  for (const auto& failure : outcome.failures) {
    std::cerr << "warning: participant '" << failure.participant_id
              << "' not scored: " << failure.message << "\n";
  }

  const fs::path out_dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  sentiscore::detail::write_file(
      (out_dir / "scores.csv").string(),
      sentiscore::score_reports_to_csv(outcome.reports));
  sentiscore::detail::write_file(
      (out_dir / "scores.json").string(),
      sentiscore::scoring_outcome_to_json(outcome).dump(2) + "\n");
  if (!outcome.reports.empty()) {
    sentiscore::detail::write_file(
        (out_dir / "distributions.json").string(),
        sentiscore::distributions_to_json(outcome.reports).dump(2) + "\n");
  }
  std::cerr << "scored " << outcome.reports.size() << " participants ("
            << outcome.failures.size() << " failures) into " << cfg.output_dir
            << "\n";
  return 0;
}

void print_test_line(const char* name, const sentiscore::TestResult& r) {
  std::cout << name << ": t = " << sentiscore::format_double(r.t)
            << ", df = " << sentiscore::format_double(r.df)
            << ", p = " << sentiscore::format_double(r.p) << "\n";
}

int cmd_analyze_summary(const std::vector<double>& a,
                        const std::vector<double>& b) {
  sentiscore::SampleSummary sa{static_cast<std::size_t>(a[0]), a[1], a[2]};
  sentiscore::SampleSummary sb{static_cast<std::size_t>(b[0]), b[1], b[2]};
  const sentiscore::TestResult pooled =
      sentiscore::pooled_t_from_summary(sa, sb);
  const sentiscore::TestResult welch = sentiscore::welch_t_from_summary(sa, sb);
  print_test_line("pooled", pooled);
  print_test_line("welch", welch);
  nlohmann::json out{{"a", sentiscore::sample_summary_to_json(sa)},
                     {"b", sentiscore::sample_summary_to_json(sb)},
                     {"pooled", sentiscore::test_result_to_json(pooled)},
                     {"welch", sentiscore::test_result_to_json(welch)}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_analyze(const PipelineConfig& cfg) {
  const fs::path out_dir(cfg.output_dir);
  const std::string scores_path = (out_dir / "scores.json").string();
  nlohmann::json scores_doc;
  try {
    scores_doc =
        nlohmann::json::parse(sentiscore::detail::read_file(scores_path));
  } catch (const nlohmann::json::exception& e) {
    throw sentiscore::FormatError("cannot parse " + scores_path + ": " +
                                  e.what());
  }
  std::vector<sentiscore::ScoreReport> reports =
      sentiscore::score_reports_from_json(scores_doc);
  std::vector<sentiscore::ParticipantRecord> participants =
      sentiscore::load_participants(cfg.participants_path);

  std::vector<sentiscore::AnalysisCell> cells = sentiscore::analyze_reports(
      reports, participants, cfg.cesd_cutoff, cfg.panas_threshold);

  sentiscore::detail::write_file((out_dir / "analysis.csv").string(),
                                 sentiscore::analysis_to_csv(cells));
  sentiscore::detail::write_file(
      (out_dir / "analysis.json").string(),
      sentiscore::analysis_to_json(cells).dump(2) + "\n");

  for (const sentiscore::AnalysisCell& cell : cells) {
    std::cout << cell.grouping << " / " << cell.field << ": ";
    if (!cell.ok) {
      std::cout << "unavailable (" << cell.error << ")\n";
      continue;
    }
    const sentiscore::GroupComparison& c = cell.comparison;
    std::cout << cell.label_a << " n=" << c.a.n << " mean="
              << sentiscore::format_double(c.a.mean) << " sd="
              << sentiscore::format_double(c.a.sd) << "; " << cell.label_b
              << " n=" << c.b.n << " mean="
              << sentiscore::format_double(c.b.mean) << " sd="
              << sentiscore::format_double(c.b.sd) << "; pooled t("
              << sentiscore::format_double(c.pooled.df)
              << ")=" << sentiscore::format_double(c.pooled.t)
              << " p=" << sentiscore::format_double(c.pooled.p) << "; welch t("
              << sentiscore::format_double(c.welch.df)
              << ")=" << sentiscore::format_double(c.welch.t)
              << " p=" << sentiscore::format_double(c.welch.p) << "\n";
  }
  std::cerr << "analysis written to " << cfg.output_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convolutional sentiment scoring and group analysis"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "key = value config file");
  app.add_option("--set", overrides, "override a config key (key=value)");

  CLI::App* gen = app.add_subcommand(
      "gen-corpus", "generate a synthetic score-labeled review corpus");

  CLI::App* train = app.add_subcommand(
      "train", "split the corpus, build the vocabulary and train a model");
  std::size_t granularity = 10;
  train->add_option("-g,--granularity", granularity,
                    "number of score classes (10, 5 or 3)");

  CLI::App* eval = app.add_subcommand(
      "eval", "report top-k accuracy of a trained model on the test split");
  std::string eval_model;
  std::string eval_vocab;
  std::string ks_arg = "1,3,5";
  eval->add_option("-m,--model", eval_model, "model file")->required();
  eval->add_option("--vocab", eval_vocab,
                   "vocabulary file (default: alongside the model)");
  eval->add_option("-k,--ks", ks_arg, "comma-separated top-k ranks");

  CLI::App* score = app.add_subcommand(
      "score", "score participant summaries with the trained models");

  CLI::App* analyze = app.add_subcommand(
      "analyze", "run the psychometric group comparisons over score reports");
  std::vector<double> summary_a;
  std::vector<double> summary_b;
  analyze
      ->add_option("--summary-a", summary_a,
                   "summary-stats mode, group A: n,mean,sd")
      ->delimiter(',')
      ->expected(3);
  analyze
      ->add_option("--summary-b", summary_b,
                   "summary-stats mode, group B: n,mean,sd")
      ->delimiter(',')
      ->expected(3);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const PipelineConfig cfg = resolve_config(config_path, overrides);
    if (gen->parsed()) {
      return cmd_gen_corpus(cfg);
    }
    if (train->parsed()) {
      return cmd_train(cfg, granularity);
    }
    if (eval->parsed()) {
      std::vector<std::size_t> ks;
      std::size_t begin = 0;
      while (begin <= ks_arg.size()) {
        const std::size_t comma = ks_arg.find(',', begin);
        const std::string part = ks_arg.substr(
            begin, comma == std::string::npos ? std::string::npos
                                              : comma - begin);
        ks.push_back(sentiscore::detail::parse_u64(part, "--ks"));
        if (comma == std::string::npos) break;
        begin = comma + 1;
      }
      return cmd_eval(cfg, eval_model, eval_vocab, ks);
    }
    if (score->parsed()) {
      return cmd_score(cfg);
    }
    if (analyze->parsed()) {
      if (!summary_a.empty() || !summary_b.empty()) {
        if (summary_a.size() != 3 || summary_b.size() != 3) {
          throw sentiscore::UsageError(
              "summary-stats mode needs both --summary-a and --summary-b");
        }
        return cmd_analyze_summary(summary_a, summary_b);
      }
      return cmd_analyze(cfg);
    }
    throw sentiscore::UsageError("no subcommand given");
  } catch (const sentiscore::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sentiscore::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const sentiscore::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
