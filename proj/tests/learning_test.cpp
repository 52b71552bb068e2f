#include "sepmark/learning.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sepmark/error.hpp"
#include "sepmark/inference.hpp"

using namespace sepmark;

namespace {

Sentence make_sentence(std::vector<std::string> words,
                       std::vector<Mention> mentions = {}) {
  Sentence s;
  static int counter = 0;
  s.id = "s" + std::to_string(counter++);
  for (const std::string& w : words) s.tokens.push_back({w, "N"});
  for (const Mention& m : mentions) s.add_mention(m);
  return s;
}

FeatureConfig word_only(int window) {
  FeatureConfig cfg;
  cfg.word_window = window;
  return cfg;
}

Corpus small_corpus() {
  Corpus c;
  c.sentences.push_back(
      make_sentence({"a", "b", "c"}, {{0, 2, "P"}, {1, 1, "P"}}));
  c.sentences.push_back(make_sentence({"d", "e"}, {{0, 0, "Q"}}));
  c.sentences.push_back(make_sentence({"f"}));
  c.rebuild_label_set();
  return c;
}

TrainConfig zero_iterations() {
  TrainConfig cfg;
  cfg.max_iterations = 0;
  return cfg;
}

// first iteration whose objective is within 1% of the final one
int iterations_to_near_final(const std::vector<ObjectiveReport>& reports) {
  const double final_objective = reports.back().objective;
  const double bar = final_objective - 0.01 * std::abs(final_objective);
  for (const ObjectiveReport& r : reports) {
    if (r.objective >= bar) return r.iteration;
  }
  return reports.back().iteration;
}

}  // namespace

TEST_CASE("learning: objective and penalty gradient on the two-path network") {
  Corpus corpus;
  corpus.sentences.push_back(make_sentence({"x"}));
  corpus.label_set = {"L"};

  const TrainResult start = train(corpus, ModelScheme::Edge, word_only(0),
                                  zero_iterations());
  CHECK(start.model.weights.size() == start.model.dictionary.size());
  for (const double w : start.model.weights) CHECK(w == 0.0);
  REQUIRE(start.reports.size() == 1);
  CHECK(start.reports[0].iteration == 0);

  // two equiprobable structures; gold is the all-outside path
  const auto [value, grad] = objective_and_gradient(corpus, start.model, 0.0);
  CHECK(value == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
  CHECK(grad[kPenaltyFeature] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(start.reports[0].objective == doctest::Approx(value).epsilon(1e-12));
}

TEST_CASE("learning: the regularizer's contribution is exactly algebraic") {
  Corpus corpus;
  corpus.sentences.push_back(make_sentence({"x"}));
  corpus.label_set = {"L"};
  Model model =
      train(corpus, ModelScheme::Edge, word_only(0), zero_iterations()).model;
  model.weights[0] = 1.0;

  const auto [plain, plain_grad] = objective_and_gradient(corpus, model, 0.0);
  const auto [reg, reg_grad] = objective_and_gradient(corpus, model, 1.0);
  CHECK(reg == doctest::Approx(plain - 1.0).epsilon(1e-12));
  CHECK(reg_grad[0] == doctest::Approx(plain_grad[0] - 2.0).epsilon(1e-12));
}

TEST_CASE("learning: gradient matches central differences for all schemes") {
  const Corpus corpus = small_corpus();
  for (const ModelScheme scheme :
       {ModelScheme::LcrfSingle, ModelScheme::LcrfMulti, ModelScheme::State,
        ModelScheme::Edge, ModelScheme::Hypergraph}) {
    CAPTURE(to_string(scheme));
    const Model model =
        train(corpus, scheme, word_only(1), zero_iterations()).model;
    CHECK(finite_difference_check(corpus, model, 0.01, 1e-4) <= 1e-4);
  }
}

TEST_CASE("learning: gradient still matches after training steps") {
  const Corpus corpus = small_corpus();
  TrainConfig cfg;
  cfg.max_iterations = 10;
  cfg.lambda = 0.01;
  const Model model =
      train(corpus, ModelScheme::Edge, word_only(1), cfg).model;
  CHECK(finite_difference_check(corpus, model, 0.01, 1e-4) <= 1e-4);
}

TEST_CASE("learning: finite-difference step must be positive") {
  const Corpus corpus = small_corpus();
  const Model model =
      train(corpus, ModelScheme::Edge, word_only(0), zero_iterations()).model;
  CHECK_THROWS_AS(finite_difference_check(corpus, model, 0.0, 0.0), DataError);
  CHECK_THROWS_AS(finite_difference_check(corpus, model, 0.0, -1e-4), DataError);
}

TEST_CASE("learning: training is deterministic and thread-independent") {
  const Corpus corpus = small_corpus();
  TrainConfig cfg;
  cfg.max_iterations = 12;
  cfg.lambda = 0.1;

  const TrainResult a = train(corpus, ModelScheme::State, word_only(1), cfg);
  const TrainResult b = train(corpus, ModelScheme::State, word_only(1), cfg);
  CHECK(a.model == b.model);

  TrainConfig threaded = cfg;
  threaded.threads = 4;
  const TrainResult c = train(corpus, ModelScheme::State, word_only(1), threaded);
  CHECK(a.model.weights == c.model.weights);
}

TEST_CASE("learning: objective is monotone and improves over the start") {
  const Corpus corpus = small_corpus();
  TrainConfig cfg;
  cfg.max_iterations = 30;
  cfg.lambda = 0.1;
  const TrainResult r = train(corpus, ModelScheme::Edge, word_only(1), cfg);
  REQUIRE(r.reports.size() >= 2);
  for (std::size_t i = 1; i < r.reports.size(); ++i) {
    CHECK(r.reports[i].objective >= r.reports[i - 1].objective - 1e-12);
    CHECK(r.reports[i].seconds >= r.reports[i - 1].seconds);
  }
  CHECK(r.reports.back().objective > r.reports.front().objective);

  double norm = 0.0;
  for (const double w : r.model.weights) norm += w * w;
  CHECK(std::isfinite(norm));
}

TEST_CASE("learning: strict gold surfaces capacity errors, default reduces") {
  Corpus corpus;
  corpus.sentences.push_back(
      make_sentence({"a", "b", "c"}, {{0, 1, "P"}, {1, 2, "P"}}));
  corpus.rebuild_label_set();

  TrainConfig strict = zero_iterations();
  strict.strict_gold = true;
  CHECK_THROWS_AS(
      train(corpus, ModelScheme::LcrfSingle, word_only(0), strict),
      CapacityError);

  const TrainResult reduced =
      train(corpus, ModelScheme::LcrfSingle, word_only(0), zero_iterations());
  CHECK(reduced.dropped_mentions == 1);

  // the separator schemes represent the overlap and drop nothing
  const TrainResult kept =
      train(corpus, ModelScheme::Edge, word_only(0), zero_iterations());
  CHECK(kept.dropped_mentions == 0);
}

TEST_CASE("learning: empty corpus is rejected") {
  Corpus corpus;
  CHECK_THROWS_AS(train(corpus, ModelScheme::Edge, word_only(0), TrainConfig{}),
                  DataError);
}

TEST_CASE("learning: a separable toy corpus is learned exactly") {
  Corpus corpus;
  for (int i = 0; i < 10; ++i) {
    corpus.sentences.push_back(
        make_sentence({"john", "smith"}, {{0, 1, "PER"}}));
    corpus.sentences.push_back(make_sentence({"the", "cat"}));
  }
  corpus.rebuild_label_set();

  TrainConfig cfg;
  cfg.max_iterations = 50;
  cfg.lambda = 0.01;
  const Model model = train(corpus, ModelScheme::Edge, word_only(1), cfg).model;

  const CompiledCorpus compiled = compile_corpus(corpus, model);
  for (std::size_t i = 0; i < compiled.items.size(); ++i) {
    const CompiledSentence& item = compiled.items[i];
    std::vector<double> theta(item.network.num_edges(), 0.0);
    for (std::uint32_t e = 0; e < item.network.num_edges(); ++e) {
      for (const auto& [id, count] : item.features[e]) {
        theta[e] += model.weights[id] * count;
      }
    }
    const DecodeResult best = decode(item.network, theta);
    CHECK(read_structure(best.structure) == compiled.sentences[i].mentions);
  }
}

TEST_CASE("learning: the edge scheme closes in on its optimum sooner than "
          "the hypergraph on nested data") {
  Corpus corpus;
  for (int i = 0; i < 6; ++i) {
    corpus.sentences.push_back(
        make_sentence({"w1", "w2", "w3"}, {{0, 2, "A"}, {1, 1, "A"}}));
    corpus.sentences.push_back(make_sentence({"w4", "w5"}, {{0, 1, "B"}}));
  }
  corpus.rebuild_label_set();

  TrainConfig cfg;
  cfg.max_iterations = 60;
  cfg.lambda = 0.01;
  cfg.grad_tolerance = 1e-8;
  const TrainResult edge = train(corpus, ModelScheme::Edge, word_only(1), cfg);
  const TrainResult hyper =
      train(corpus, ModelScheme::Hypergraph, word_only(1), cfg);
  CHECK(iterations_to_near_final(edge.reports) <=
        iterations_to_near_final(hyper.reports));
}

TEST_CASE("learning: model files round-trip exactly") {
  const Corpus corpus = small_corpus();
  TrainConfig cfg;
  cfg.max_iterations = 5;
  cfg.lambda = 0.01;
  Model model = train(corpus, ModelScheme::State,
                      FeatureConfig::preset("conll"), cfg).model;
  model.penalty_offset = -0.3;

  std::ostringstream bytes_a, bytes_b;
  save_model(model, bytes_a);
  save_model(model, bytes_b);
  CHECK(bytes_a.str() == bytes_b.str());

  std::istringstream in(bytes_a.str());
  const Model restored = load_model(in);
  CHECK(restored == model);

  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "sepmark_model_test.bin";
  save_model(model, path.string());
  CHECK(load_model(path.string()) == model);
  fs::remove(path);
}

TEST_CASE("learning: model loader rejects foreign and damaged files") {
  std::istringstream not_model("PK\x03\x04 something else entirely");
  CHECK_THROWS_AS(load_model(not_model), DataError);

  const Corpus corpus = small_corpus();
  const Model model =
      train(corpus, ModelScheme::Edge, word_only(0), zero_iterations()).model;
  std::ostringstream bytes;
  save_model(model, bytes);

  const std::string full = bytes.str();
  std::istringstream truncated(full.substr(0, full.size() / 2));
  CHECK_THROWS_AS(load_model(truncated), DataError);

  std::string wrong_version = full;
  wrong_version[4] = 9;  // bump the little-endian version field
  std::istringstream versioned(wrong_version);
  CHECK_THROWS_AS(load_model(versioned), DataError);

  CHECK_THROWS_AS(load_model("/no/such/model.bin"), DataError);
}
