#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sepmark/corpus.hpp"
#include "sepmark/features.hpp"
#include "sepmark/model.hpp"
#include "sepmark/network.hpp"

namespace sepmark {

struct TrainConfig {
  double lambda = 0.0;  // l2 coefficient; subtracts lambda * ||w||^2
  int max_iterations = 200;
  double grad_tolerance = 1e-4;
  int history = 10;  // L-BFGS memory
  int threads = 1;
  bool strict_gold = false;  // fail on annotations the scheme cannot encode
                             // instead of silently reducing them
};

// One convergence-curve sample; iteration 0 is the starting point.
struct ObjectiveReport {
  int iteration = 0;
  double objective = 0.0;  // the maximized regularized log-likelihood
  double grad_norm = 0.0;
  double seconds = 0.0;  // wall time since training started
};

// A sentence ready for repeated objective evaluations.
struct CompiledSentence {
  Network network;  // penalty-marked
  std::vector<SparseFeatureVector> features;  // per edge, frozen dictionary
  std::vector<std::uint32_t> gold_edges;
};

// Owns the (possibly reduced) sentence copies its networks point into, so
// it moves but does not copy.
struct CompiledCorpus {
  std::vector<Sentence> sentences;
  std::vector<CompiledSentence> items;
  int dropped_mentions = 0;

  CompiledCorpus() = default;
  CompiledCorpus(const CompiledCorpus&) = delete;
  CompiledCorpus& operator=(const CompiledCorpus&) = delete;
  CompiledCorpus(CompiledCorpus&&) = default;
  CompiledCorpus& operator=(CompiledCorpus&&) = default;
};

// Builds networks, feature caches and gold structures for every sentence.
// Mentions the scheme cannot represent are dropped with a warning, or, when
// strict_gold, surface as the CapacityError from gold_structure.
CompiledCorpus compile_corpus(const Corpus& corpus, const Model& model,
                              bool strict_gold = false,
                              const BrownClusterMap* brown = nullptr);

// L(w) = sum over sentences of [w.f(gold) - log Z] - lambda * ||w||^2 and
// its gradient sum [f(gold) - E[f]] - 2 lambda w. Sentence terms may be
// computed in parallel but are reduced in sentence order, so the result is
// independent of the thread count.
double objective_and_gradient(const CompiledCorpus& compiled,
                              const std::vector<double>& weights,
                              double lambda, int threads,
                              std::vector<double>& grad);

// Convenience wrapper that compiles the corpus against the model first.
std::pair<double, std::vector<double>> objective_and_gradient(
    const Corpus& corpus, const Model& model, double lambda,
    const BrownClusterMap* brown = nullptr);

struct TrainResult {
  Model model;
  std::vector<ObjectiveReport> reports;
  int dropped_mentions = 0;
  bool converged = false;
  bool line_search_failed = false;
};

// Builds the dictionary on the corpus, then maximizes L from w = 0 with
// L-BFGS. A failed line search warns and keeps the best iterate.
TrainResult train(const Corpus& corpus, ModelScheme scheme,
                  const FeatureConfig& feature_config,
                  const TrainConfig& config,
                  const BrownClusterMap* brown = nullptr);

// Max relative error between the analytic gradient and central differences
// over every coordinate. Meant for small corpora; epsilon must be positive.
double finite_difference_check(const Corpus& corpus, const Model& model,
                               double lambda, double epsilon,
                               const BrownClusterMap* brown = nullptr);

}  // namespace sepmark
