#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sentiscore/corpus.hpp"
#include "sentiscore/gradcheck.hpp"
#include "sentiscore/model.hpp"
#include "sentiscore/text.hpp"

using namespace sentiscore;

namespace {

ModelConfig tiny_config(std::size_t classes = 3) {
  ModelConfig c;
  c.vocab_top_n = 8;
  c.doc_length = 6;
  c.embed_dim = 4;
  c.filters = 3;
  c.kernel_width = 2;
  c.hidden_dim = 4;
  c.num_classes = classes;
  c.learning_rate = 0.05;
  c.momentum = 0.9;
  c.epochs = 3;
  c.batch_size = 4;
  c.seed = 7;
  return c;
}

Corpus tiny_corpus() {
  Corpus corpus;
  const char* texts[] = {
      "good great fine",        "bad awful poor",   "plain dull flat",
      "great good good",        "awful bad bad",    "flat plain plain",
      "fine great good plain",  "poor awful flat",  "dull plain bad",
      "good fine fine",         "bad poor poor",    "plain flat dull",
  };
  const int scores[] = {3, 1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2};
  for (int i = 0; i < 12; ++i) {
    corpus.reviews.push_back(
        {"t" + std::to_string(i), texts[i], scores[i]});
  }
  corpus.granularity = Granularity::three;
  return corpus;
}

std::vector<EncodedDoc> encode_texts(const std::vector<std::string>& texts,
                                     const Vocabulary& vocab,
                                     std::size_t length) {
  std::vector<EncodedDoc> docs;
  for (const std::string& t : texts) {
    docs.push_back(encode(tokenize(t), vocab, length));
  }
  return docs;
}

bool tensors_equal(const Tensor& a, const Tensor& b) {
  return a.shape == b.shape && a.data == b.data;
}

bool models_equal(const ModelParameters& a, const ModelParameters& b) {
  return tensors_equal(a.embedding, b.embedding) &&
         tensors_equal(a.conv_kernels, b.conv_kernels) &&
         tensors_equal(a.conv_bias, b.conv_bias) &&
         tensors_equal(a.hidden_weight, b.hidden_weight) &&
         tensors_equal(a.hidden_bias, b.hidden_bias) &&
         tensors_equal(a.bn.gamma, b.bn.gamma) &&
         tensors_equal(a.bn.beta, b.bn.beta) &&
         tensors_equal(a.bn.running_mean, b.bn.running_mean) &&
         tensors_equal(a.bn.running_var, b.bn.running_var) &&
         tensors_equal(a.output_weight, b.output_weight) &&
         tensors_equal(a.output_bias, b.output_bias);
}

}  // namespace

TEST_CASE("build_model shapes and determinism") {
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);

  ModelParameters a = build_model(tiny_config(), vocab);
  ModelParameters b = build_model(tiny_config(), vocab);
  CHECK(models_equal(a, b));

  ModelConfig other = tiny_config();
  other.seed = 8;
  CHECK_FALSE(models_equal(a, build_model(other, vocab)));

  ModelConfig five = tiny_config(5);
  ModelParameters m5 = build_model(five, vocab);
  CHECK(m5.output_weight.dim(1) == 5);
  CHECK(m5.output_bias.dim(0) == 5);

  // embedding rows: real tokens plus the two reserved slots
  Corpus three_tokens;
  three_tokens.reviews.push_back({"r", "aa bb cc", 1});
  Vocabulary small = build_vocab(three_tokens, 100);
  ModelParameters m = build_model(tiny_config(), small);
  CHECK(m.embedding.dim(0) == 5);

  ModelConfig bad = tiny_config();
  bad.kernel_width = bad.doc_length + 1;
  CHECK_THROWS_AS(build_model(bad, vocab), ShapeError);
}

TEST_CASE("gradient check on a tiny model passes over three seeds") {
  // V=10, D=4, F=3, w=2, H=4, K=3, batch of 4
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);  // 8 real + 2 reserved = 10
  REQUIRE(vocab.size() == 10);

  std::vector<EncodedDoc> docs = encode_texts(
      {"good great fine", "bad awful poor", "plain dull flat",
       "great plain bad"},
      vocab, 6);
  std::vector<int> labels = {2, 0, 1, 2};

  for (std::uint64_t seed : {101ULL, 202ULL, 303ULL}) {
    ModelConfig config = tiny_config();
    config.seed = seed;
    ModelParameters model = build_model(config, vocab);
    const double err = grad_check(model, docs, labels, 1e-5);
    INFO("seed " << seed);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("sign-flipped gradients are caught by the checker") {
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);
  std::vector<EncodedDoc> docs = encode_texts(
      {"good great fine", "bad awful poor", "plain dull flat",
       "great plain bad"},
      vocab, 6);
  std::vector<int> labels = {2, 0, 1, 2};

  ModelParameters model = build_model(tiny_config(), vocab);
  LayerGradients grads = backprop(model, docs, labels);
  for_each_gradient(grads, [](const char*, Tensor& g) {
    for (double& v : g.data) v = -v;
  });
  CHECK(max_rel_error_vs_fd(model, grads, docs, labels, 1e-5) > 0.1);
}

TEST_CASE("relative error of matching zero gradients is zero") {
  CHECK(gradcheck_relative_error(0.0, 0.0) == 0.0);
  CHECK(gradcheck_relative_error(1.0, 1.0) == 0.0);
  CHECK(gradcheck_relative_error(1.0, -1.0) > 0.1);

  // an embedding row never referenced by the batch gets no gradient
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);
  std::vector<EncodedDoc> docs =
      encode_texts({"good great fine", "bad awful poor"}, vocab, 6);
  ModelParameters model = build_model(tiny_config(), vocab);
  LayerGradients grads = backprop(model, docs, {2, 0});
  const std::uint32_t unused = vocab.lookup("dull");
  REQUIRE(unused != Vocabulary::kUnknownIndex);
  for (std::size_t d = 0; d < model.config.embed_dim; ++d) {
    CHECK(grads.embedding.at(unused, d) == 0.0);
  }
}

TEST_CASE("a confidently correct model has vanishing gradients") {
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);
  ModelParameters model = build_model(tiny_config(), vocab);
  // rig the model to put essentially all probability on class 1
  model.conv_kernels.fill(0.0);
  model.conv_bias.fill(0.0);
  model.hidden_weight.fill(0.0);
  model.hidden_bias.fill(0.0);
  model.output_weight.fill(0.0);
  model.output_bias.fill(0.0);
  model.output_bias.at(0) = 40.0;

  std::vector<EncodedDoc> docs = encode_texts(
      {"good great fine", "bad awful poor", "plain dull flat"}, vocab, 6);
  std::vector<int> labels = {0, 0, 0};  // all true
  SoftmaxResult result;
  LayerGradients grads = backprop(model, docs, labels, &result);
  CHECK(result.loss < 1e-12);
  for_each_gradient(grads, [](const char* name, Tensor& g) {
    for (double v : g.data) {
      INFO(name);
      CHECK(std::fabs(v) < 1e-8);
    }
  });
}

TEST_CASE("a model that always predicts the true class has top-1 = 1") {
  Corpus corpus;
  for (int i = 0; i < 6; ++i) {
    corpus.reviews.push_back({"c" + std::to_string(i), "good plain bad", 1});
  }
  corpus.granularity = Granularity::three;
  Vocabulary vocab = build_vocab(corpus, 8);
  ModelParameters model = build_model(tiny_config(), vocab);
  model.output_weight.fill(0.0);
  model.output_bias.fill(0.0);
  model.output_bias.at(0) = 5.0;  // always class 1, and every label is 1
  CHECK(evaluate_topk(model, vocab, corpus, {1})[0] == 1.0);
}

TEST_CASE("inverse-frequency class weighting is deterministic and finite") {
  Corpus corpus;
  const char* majority = "good great fine";
  for (int i = 0; i < 9; ++i) {
    corpus.reviews.push_back({"m" + std::to_string(i), majority, 1});
  }
  corpus.reviews.push_back({"r1", "bad awful poor", 2});
  corpus.reviews.push_back({"r2", "poor bad awful", 2});
  corpus.reviews.push_back({"r3", "plain dull flat", 3});
  corpus.granularity = Granularity::three;
  Vocabulary vocab = build_vocab(corpus, 8);

  ModelConfig config = tiny_config();
  config.epochs = 5;
  config.class_weighting = true;
  ModelParameters initial = build_model(config, vocab);
  auto [m1, h1] = train(initial, vocab, corpus, corpus);
  auto [m2, h2] = train(initial, vocab, corpus, corpus);
  REQUIRE(h1.epochs.size() == 5);
  for (std::size_t e = 0; e < 5; ++e) {
    CHECK(std::isfinite(h1.epochs[e].train_loss));
    CHECK(h1.epochs[e].train_loss == h2.epochs[e].train_loss);
  }
  CHECK(models_equal(m1, m2));

  // the weighted loss differs from the unweighted one on imbalanced data
  ModelConfig plain = config;
  plain.class_weighting = false;
  auto [m3, h3] = train(build_model(plain, vocab), vocab, corpus, corpus);
  CHECK(h3.epochs[0].train_loss != h1.epochs[0].train_loss);
}

TEST_CASE("forward and backward stay finite on finite inputs") {
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);
  ModelParameters model = build_model(tiny_config(), vocab);
  std::vector<EncodedDoc> docs = encode_texts(
      {"good great fine", "bad awful poor", "plain dull flat"}, vocab, 6);
  std::vector<int> labels = {2, 0, 1};

  SoftmaxResult result;
  LayerGradients grads = backprop(model, docs, labels, &result);
  CHECK(std::isfinite(result.loss));
  CHECK(result.probs.all_finite());
  for_each_gradient(grads, [](const char* name, Tensor& g) {
    INFO(name);
    CHECK(g.all_finite());
  });
}

TEST_CASE("duplicating every batch element leaves the gradient unchanged") {
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);
  std::vector<EncodedDoc> docs =
      encode_texts({"good great fine", "bad awful poor"}, vocab, 6);
  std::vector<int> labels = {2, 0};
  ModelParameters model = build_model(tiny_config(), vocab);
  LayerGradients once = backprop(model, docs, labels);

  std::vector<EncodedDoc> doubled = {docs[0], docs[0], docs[1], docs[1]};
  std::vector<int> doubled_labels = {2, 2, 0, 0};
  LayerGradients twice = backprop(model, doubled, doubled_labels);

  for_each_gradient(once, [&](const char* name, Tensor& g1) {
    Tensor* g2 = nullptr;
    for_each_gradient(twice, [&](const char* other, Tensor& g) {
      if (std::string(name) == other) g2 = &g;
    });
    REQUIRE(g2 != nullptr);
    for (std::size_t i = 0; i < g1.size(); ++i) {
      CHECK(g1.at(i) == Catch::Approx(g2->at(i)).margin(1e-12));
    }
  });
}

TEST_CASE("backprop rejects mismatched shapes and empty batches") {
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);
  ModelParameters model = build_model(tiny_config(), vocab);
  CHECK_THROWS_AS(backprop(model, {}, {}), EmptyInputError);

  std::vector<EncodedDoc> wrong_len =
      encode_texts({"good great fine", "bad"}, vocab, 5);
  CHECK_THROWS_AS(backprop(model, wrong_len, {0, 1}), ShapeError);
}

TEST_CASE("training learns the tiny separable corpus deterministically") {
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);
  ModelConfig config = tiny_config();
  config.epochs = 40;
  config.learning_rate = 0.1;
  config.batch_size = 4;
  ModelParameters initial = build_model(config, vocab);

  auto [model, history] = train(initial, vocab, corpus, corpus);
  REQUIRE(history.epochs.size() == 40);
  CHECK(history.epochs.back().val_top1 >= 0.9);

  // returned parameters achieve the best recorded validation accuracy
  double best = 0.0;
  for (const EpochStats& e : history.epochs) best = std::max(best, e.val_top1);
  CHECK(history.epochs[history.best_epoch].val_top1 == best);

  auto [model2, history2] = train(initial, vocab, corpus, corpus);
  REQUIRE(history2.epochs.size() == history.epochs.size());
  for (std::size_t e = 0; e < history.epochs.size(); ++e) {
    CHECK(history.epochs[e].train_loss == history2.epochs[e].train_loss);
    CHECK(history.epochs[e].val_top1 == history2.epochs[e].val_top1);
  }
  CHECK(models_equal(model, model2));
}

TEST_CASE("zero epochs returns the initial parameters and empty history") {
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);
  ModelConfig config = tiny_config();
  config.epochs = 0;
  ModelParameters initial = build_model(config, vocab);
  auto [model, history] = train(initial, vocab, corpus, corpus);
  CHECK(history.epochs.empty());
  CHECK(models_equal(model, initial));
}

TEST_CASE("an absurd learning rate raises a divergence error") {
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);
  ModelConfig config = tiny_config();
  config.learning_rate = 1e300;
  config.epochs = 20;
  ModelParameters initial = build_model(config, vocab);
  CHECK_THROWS_AS(train(initial, vocab, corpus, corpus), DivergenceError);
  CHECK_THROWS_WITH(train(initial, vocab, corpus, corpus),
                    Catch::Matchers::ContainsSubstring("epoch"));
}

TEST_CASE("predict follows argmax with lowest-index ties") {
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);
  ModelParameters model = build_model(tiny_config(), vocab);

  // force constant logits: probabilities tie, class 1 must win
  model.conv_kernels.fill(0.0);
  model.conv_bias.fill(0.0);
  model.hidden_weight.fill(0.0);
  model.hidden_bias.fill(0.0);
  model.output_weight.fill(0.0);
  model.output_bias.fill(0.0);
  EncodedDoc doc = encode(tokenize("good great"), vocab, 6);
  Prediction tie = predict(model, doc);
  CHECK(tie.predicted_class == 1);

  // a bias pushes the argmax
  model.output_bias.at(1) = 3.0;
  Prediction biased = predict(model, doc);
  CHECK(biased.predicted_class == 2);

  double sum = 0.0;
  for (std::size_t k = 0; k < 3; ++k) sum += biased.probs.at(k);
  CHECK(sum == Catch::Approx(1.0).margin(1e-9));

  EncodedDoc wrong = encode(tokenize("good"), vocab, 5);
  CHECK_THROWS_AS(predict(model, wrong), ShapeError);
}

TEST_CASE("top-k accuracy is exhaustive at k = K and non-decreasing") {
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);
  ModelConfig config = tiny_config();
  config.epochs = 30;
  config.learning_rate = 0.1;
  ModelParameters initial = build_model(config, vocab);
  auto [model, history] = train(initial, vocab, corpus, corpus);

  std::vector<double> accs = evaluate_topk(model, vocab, corpus, {1, 2, 3});
  CHECK(accs[2] == 1.0);
  CHECK(accs[0] <= accs[1]);
  CHECK(accs[1] <= accs[2]);

  CHECK_THROWS_AS(evaluate_topk(model, vocab, corpus, {4}), RangeError);
  CHECK_THROWS_AS(evaluate_topk(model, vocab, Corpus{}, {1}),
                  EmptyInputError);
}

TEST_CASE("coarsened evaluation never loses correct predictions") {
  // quick 10-class model on a small synthetic slice
  const std::array<double, 10> weights = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  Corpus corpus = gen_synthetic_corpus(300, weights, 17);
  CorpusSplit split = split_corpus(corpus, {0.7, 0.15, 0.15, 1});
  Vocabulary vocab = build_vocab(split.train, 500);

  ModelConfig config;
  config.vocab_top_n = 500;
  config.doc_length = 48;
  config.embed_dim = 8;
  config.filters = 8;
  config.kernel_width = 3;
  config.hidden_dim = 8;
  config.num_classes = 10;
  config.epochs = 3;
  config.batch_size = 16;
  config.seed = 5;
  ModelParameters initial = build_model(config, vocab);
  auto [model, history] = train(initial, vocab, split.train, split.val);

  const double top1 = evaluate_topk(model, vocab, split.test, {1})[0];
  const double five =
      evaluate_coarsened_top1(model, vocab, split.test, Granularity::five);
  const double three =
      evaluate_coarsened_top1(model, vocab, split.test, Granularity::three);
  CHECK(five >= top1);
  CHECK(three >= top1);
}

TEST_CASE("model file round trip is bit exact") {
  Corpus corpus = tiny_corpus();
  Vocabulary vocab = build_vocab(corpus, 8);
  ModelConfig config = tiny_config();
  config.epochs = 5;
  ModelParameters initial = build_model(config, vocab);
  auto [model, history] = train(initial, vocab, corpus, corpus);

  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "sentiscore_model_test.bin").string();
  save_model(model, path);
  ModelParameters loaded = load_model(path);
  CHECK(models_equal(model, loaded));
  CHECK(loaded.config.num_classes == 3);
  CHECK(loaded.config.seed == model.config.seed);

  // identical predictions after the round trip
  EncodedDoc doc = encode(tokenize("good plain bad"), vocab, 6);
  Prediction before = predict(model, doc);
  Prediction after = predict(loaded, doc);
  CHECK(before.predicted_class == after.predicted_class);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(before.probs.at(k) == after.probs.at(k));
  }

  // saving again produces identical bytes
  const std::string path2 = (dir / "sentiscore_model_test2.bin").string();
  save_model(loaded, path2);
  CHECK(detail::read_file(path) == detail::read_file(path2));

  SECTION("truncation is a format error") {
    const std::string content = detail::read_file(path);
    const std::string cut = (dir / "sentiscore_model_cut.bin").string();
    detail::write_file(cut, content.substr(0, content.size() / 2));
    CHECK_THROWS_AS(load_model(cut), FormatError);
    std::remove(cut.c_str());
  }

  SECTION("wrong magic is a format error naming the path") {
    const std::string junk = (dir / "sentiscore_model_junk.bin").string();
    detail::write_file(junk, "definitely not a model file");
    CHECK_THROWS_AS(load_model(junk), FormatError);
    CHECK_THROWS_WITH(load_model(junk),
                      Catch::Matchers::ContainsSubstring("sentiscore_model_junk"));
    std::remove(junk.c_str());
  }

  SECTION("trailing bytes are a format error") {
    const std::string content = detail::read_file(path);
    const std::string fat = (dir / "sentiscore_model_fat.bin").string();
    detail::write_file(fat, content + "x");
    CHECK_THROWS_AS(load_model(fat), FormatError);
    std::remove(fat.c_str());
  }

  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("missing model file is an io error") {
  CHECK_THROWS_AS(load_model("/nonexistent/sentiscore.bin"), IoError);
}
