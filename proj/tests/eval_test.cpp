#include "sepmark/eval.hpp"

#include <string>
#include <vector>

#include "doctest.h"
#include "sepmark/error.hpp"
#include "sepmark/learning.hpp"
#include "sepmark/util.hpp"

using namespace sepmark;

namespace {

Sentence make_sentence(const std::string& text,
                       std::vector<Mention> mentions) {
  static int next_id = 0;
  Sentence s;
  s.id = "e" + std::to_string(next_id++);
  for (std::string_view w : split_whitespace(text)) {
    s.tokens.push_back({std::string(w), "-"});
  }
  for (Mention& m : mentions) s.add_mention(std::move(m));
  return s;
}

FeatureConfig word_only(int window) {
  FeatureConfig config;
  config.word_window = window;
  return config;
}

// Ten trivially learnable sentences of each kind.
Corpus separable_corpus() {
  Corpus corpus;
  for (int i = 0; i < 10; ++i) {
    corpus.sentences.push_back(make_sentence("john smith", {{0, 1, "PER"}}));
    corpus.sentences.push_back(make_sentence("the cat", {}));
  }
  corpus.rebuild_label_set();
  return corpus;
}

Corpus singleton_corpus(int n) {
  Corpus corpus;
  for (int i = 0; i < n; ++i) {
    corpus.sentences.push_back(make_sentence("word", {{0, 0, "T"}}));
  }
  corpus.rebuild_label_set();
  return corpus;
}

Model zero_model(const Corpus& corpus, ModelScheme scheme) {
  TrainConfig config;
  config.max_iterations = 0;
  return train(corpus, scheme, word_only(0), config).model;
}

Model trained_model(const Corpus& corpus) {
  TrainConfig config;
  config.lambda = 0.01;
  config.max_iterations = 50;
  return train(corpus, ModelScheme::Edge, word_only(0), config).model;
}

std::vector<std::vector<Mention>> gold_lists(const Corpus& corpus) {
  std::vector<std::vector<Mention>> lists;
  for (const Sentence& s : corpus.sentences) lists.push_back(s.mentions);
  return lists;
}

// Sentences without words never decode to anything, so every grid offset
// ties; handy for pinning the tie-break rules.
Corpus blank_corpus(int n) {
  Corpus corpus;
  for (int i = 0; i < n; ++i) {
    corpus.sentences.push_back(Sentence{"b" + std::to_string(i), {}, {}});
  }
  return corpus;
}

Model empty_model() {
  Model model;
  model.weights.assign(model.dictionary.size(), 0.0);
  return model;
}

}  // namespace

TEST_CASE("eval: prf zero-denominator conventions") {
  PRF both_empty = compute_prf(0, 0, 0);
  CHECK(both_empty.precision == 1.0);
  CHECK(both_empty.recall == 1.0);
  CHECK(both_empty.f1 == 1.0);

  PRF nothing_predicted = compute_prf(0, 0, 5);
  CHECK(nothing_predicted.precision == 0.0);
  CHECK(nothing_predicted.recall == 0.0);
  CHECK(nothing_predicted.f1 == 0.0);

  PRF nothing_gold = compute_prf(0, 3, 0);
  CHECK(nothing_gold.precision == 0.0);
  CHECK(nothing_gold.recall == 1.0);
  CHECK(nothing_gold.f1 == 0.0);

  PRF half_recall = compute_prf(2, 2, 4);
  CHECK(half_recall.precision == 1.0);
  CHECK(half_recall.recall == 0.5);
  CHECK(half_recall.f1 == doctest::Approx(2.0 / 3.0));

  PRF even = compute_prf(1, 2, 2);
  CHECK(even.precision == 0.5);
  CHECK(even.recall == 0.5);
  CHECK(even.f1 == 0.5);
}

TEST_CASE("eval: exact span and label matching") {
  Corpus gold;
  gold.sentences.push_back(make_sentence("a b c", {{0, 2, "X"}, {1, 1, "Y"}}));
  gold.sentences.push_back(make_sentence("d e", {{0, 0, "X"}, {1, 1, "X"}}));
  gold.rebuild_label_set();

  PRF two_of_four = score(gold, {{{0, 2, "X"}}, {{1, 1, "X"}}});
  CHECK(two_of_four.true_positives == 2);
  CHECK(two_of_four.num_predicted == 2);
  CHECK(two_of_four.num_gold == 4);
  CHECK(two_of_four.precision == 1.0);
  CHECK(two_of_four.recall == 0.5);
  CHECK(two_of_four.f1 == doctest::Approx(2.0 / 3.0));

  // The right span under the wrong label is both a false positive and a miss.
  PRF wrong_label = score(gold, {{{0, 2, "Y"}}, {}});
  CHECK(wrong_label.true_positives == 0);
  CHECK(wrong_label.num_predicted == 1);
  CHECK(wrong_label.f1 == 0.0);

  // Duplicate predictions collapse to one.
  PRF duplicated = score(gold, {{{0, 2, "X"}, {0, 2, "X"}}, {}});
  CHECK(duplicated.true_positives == 1);
  CHECK(duplicated.num_predicted == 1);

  // Reordering sentences together with their predictions changes nothing.
  Corpus reordered;
  reordered.sentences.push_back(gold.sentences[1]);
  reordered.sentences.push_back(gold.sentences[0]);
  PRF swapped = score(reordered, {{{1, 1, "X"}}, {{0, 2, "X"}}});
  CHECK(swapped.true_positives == two_of_four.true_positives);
  CHECK(swapped.precision == two_of_four.precision);
  CHECK(swapped.recall == two_of_four.recall);
  CHECK(swapped.f1 == two_of_four.f1);
}

TEST_CASE("eval: misaligned inputs are rejected") {
  Corpus gold;
  gold.sentences.push_back(make_sentence("a b", {{0, 0, "X"}}));
  gold.sentences.push_back(make_sentence("c", {}));
  gold.rebuild_label_set();

  CHECK_THROWS_AS(score(gold, std::vector<std::vector<Mention>>{{}}),
                  DataError);

  Corpus shorter = gold;
  shorter.sentences.pop_back();
  CHECK_THROWS_AS(score(gold, shorter), DataError);

  Corpus reworded = gold;
  reworded.sentences[1].tokens.push_back({"extra", "-"});
  CHECK_THROWS_AS(score(gold, reworded), DataError);

  Corpus aligned = gold;
  aligned.sentences[0].mentions.clear();
  CHECK(score(gold, aligned).num_predicted == 0);
}

TEST_CASE("eval: bootstrap significance") {
  Corpus gold = singleton_corpus(50);
  std::vector<std::vector<Mention>> perfect = gold_lists(gold);
  std::vector<std::vector<Mention>> empty(50);

  SignificanceResult same =
      bootstrap_significance(gold, perfect, perfect, 1000, 7);
  CHECK(same.p_value == 1.0);
  CHECK(same.f1_a == 1.0);
  CHECK(same.f1_b == 1.0);
  CHECK(same.replicates == 1000);

  SignificanceResult apart =
      bootstrap_significance(gold, perfect, empty, 1000, 7);
  CHECK(apart.f1_a == 1.0);
  CHECK(apart.f1_b == 0.0);
  CHECK(apart.p_value < 0.01);

  SignificanceResult again =
      bootstrap_significance(gold, perfect, empty, 1000, 7);
  CHECK(again.p_value == apart.p_value);

  // Swapping the systems flips the sign of every replicate identically.
  std::vector<std::vector<Mention>> partial = perfect;
  for (int i = 0; i < 5; ++i) partial[i].clear();
  SignificanceResult ab = bootstrap_significance(gold, perfect, partial, 1000, 99);
  SignificanceResult ba = bootstrap_significance(gold, partial, perfect, 1000, 99);
  CHECK(ab.p_value == ba.p_value);
  CHECK(ab.p_value >= 0.0);
  CHECK(ab.p_value <= 1.0);

  CHECK_THROWS_AS(bootstrap_significance(gold, perfect, empty, 999, 7),
                  DataError);
}

TEST_CASE("eval: penalty offset shifts predictions at decode time") {
  Corpus mini;
  mini.sentences.push_back(make_sentence("a", {{0, 0, "PER"}}));
  mini.rebuild_label_set();
  Model model = zero_model(mini, ModelScheme::Edge);

  // All-zero weights tie everywhere; the all-outside structure wins.
  CHECK(predict_sentence(model, mini.sentences[0]).empty());

  model.penalty_offset = 1.0;
  std::vector<Mention> boosted = predict_sentence(model, mini.sentences[0]);
  CHECK(boosted == std::vector<Mention>{{0, 0, "PER"}});

  model.penalty_offset = -1.0;
  CHECK(predict_sentence(model, mini.sentences[0]).empty());
}

TEST_CASE("eval: predictions from a trained model") {
  Corpus corpus = separable_corpus();
  Model model = trained_model(corpus);

  Corpus predicted = predict_corpus(model, corpus, nullptr, 2);
  REQUIRE(predicted.sentences.size() == corpus.sentences.size());
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    CHECK(predicted.sentences[i].tokens == corpus.sentences[i].tokens);
    CHECK(predicted.sentences[i].mentions == corpus.sentences[i].mentions);
  }
  CHECK(score(corpus, predicted).f1 == 1.0);
}

TEST_CASE("eval: penalty sweep on a trained model") {
  Corpus corpus = separable_corpus();
  Model model = trained_model(corpus);

  PenaltySweep sweep = tune_penalty(model, corpus, {}, nullptr, 2);
  CHECK(sweep.points.size() == 41);

  // More bonus, more mentions.
  for (std::size_t i = 1; i < sweep.points.size(); ++i) {
    CHECK(sweep.points[i].predicted_mentions >=
          sweep.points[i - 1].predicted_mentions);
  }

  const PenaltyPoint* at_zero = nullptr;
  for (const PenaltyPoint& point : sweep.points) {
    if (point.offset == 0.0) at_zero = &point;
  }
  REQUIRE(at_zero != nullptr);
  CHECK(sweep.chosen_prf.f1 >= at_zero->prf.f1);

  // The model is already perfect, so the F1 plateau contains zero and the
  // tie-break keeps it there.
  CHECK(at_zero->prf.f1 == 1.0);
  CHECK(sweep.chosen == 0.0);
  CHECK(model.penalty_offset == sweep.chosen);
}

TEST_CASE("eval: penalty sweep grids and tie-breaks") {
  Corpus blanks = blank_corpus(2);
  Model model = empty_model();

  // Every offset decodes to nothing, so all points tie at F1 = 1.
  PenaltySweep pair = tune_penalty(model, blanks, {-0.5, 0.5, 1.0});
  REQUIRE(pair.points.size() == 2);
  CHECK(pair.points[0].prf.f1 == 1.0);
  CHECK(pair.points[1].prf.f1 == 1.0);
  CHECK(pair.chosen == -0.5);  // equal magnitudes, the smaller offset wins
  CHECK(model.penalty_offset == -0.5);

  PenaltySweep negatives = tune_penalty(model, blanks, {-2.0, -1.0, 1.0});
  CHECK(negatives.chosen == -1.0);  // smallest magnitude wins first

  PenaltySweep identity = tune_penalty(model, blanks, {0.0, 0.0, 0.1});
  REQUIRE(identity.points.size() == 1);
  CHECK(identity.points[0].offset == 0.0);
  CHECK(identity.chosen == 0.0);
  CHECK(model.penalty_offset == 0.0);

  CHECK_THROWS_AS(tune_penalty(model, blanks, {1.0, 0.0, 0.1}), DataError);
  CHECK_THROWS_AS(tune_penalty(model, blanks, {0.0, 1.0, 0.0}), DataError);
  CHECK_THROWS_AS(tune_penalty(model, blanks, {0.0, 1.0, -0.5}), DataError);
}

TEST_CASE("eval: throughput") {
  Corpus corpus = separable_corpus();
  Model model = trained_model(corpus);

  ThroughputReport report = throughput(model, corpus);
  CHECK(report.total_words == corpus.word_count());
  CHECK(report.total_words == 40);
  CHECK(report.words_per_second > 0.0);
  CHECK(report.wall_seconds >= 0.0);

  CHECK_THROWS_WITH_AS(throughput(model, Corpus{}),
                       "cannot measure throughput: the corpus has no words",
                       DataError);
}

TEST_CASE("eval: report rendering") {
  std::string prf = render_prf(compute_prf(2, 2, 4));
  CHECK(prf.find("TP 2\n") != std::string::npos);
  CHECK(prf.find("pred 2\n") != std::string::npos);
  CHECK(prf.find("gold 4\n") != std::string::npos);
  CHECK(prf.find("P 1.000000\n") != std::string::npos);
  CHECK(prf.find("R 0.500000\n") != std::string::npos);
  CHECK(prf.find("F1 0.666667\n") != std::string::npos);

  Corpus blanks = blank_corpus(1);
  Model model = empty_model();
  PenaltySweep sweep = tune_penalty(model, blanks, {-0.5, 0.5, 1.0});
  std::string rendered = render_sweep(sweep);
  CHECK(rendered.find("c -0.5 ") != std::string::npos);
  CHECK(rendered.find("c 0.5 ") != std::string::npos);
  CHECK(rendered.find("chosen -0.5 F1 1.000000") != std::string::npos);

  ThroughputReport report;
  report.total_words = 40;
  report.wall_seconds = 0.5;
  report.words_per_second = 80.0;
  std::string speed = render_throughput(report);
  CHECK(speed.find("words 40\n") != std::string::npos);
  CHECK(speed.find("seconds 0.500000\n") != std::string::npos);
  CHECK(speed.find("words_per_second 80.0\n") != std::string::npos);
}
