#include "sepmark/learning.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "sepmark/error.hpp"
#include "sepmark/inference.hpp"
#include "sepmark/lbfgs.hpp"
#include "sepmark/log.hpp"
#include "sepmark/util.hpp"

namespace sepmark {
namespace {

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return std::sqrt(s);
}

// One sentence's additive share of the objective and gradient. The
// increments are replayed in a fixed order by the sequential reduction.
struct SentenceTerm {
  double value = 0.0;
  std::vector<std::pair<std::uint32_t, double>> increments;
};

SentenceTerm sentence_term(const CompiledSentence& item,
                           const std::vector<double>& weights) {
  const Network& net = item.network;
  std::vector<double> theta(net.num_edges(), 0.0);
  for (std::uint32_t e = 0; e < net.num_edges(); ++e) {
    double t = 0.0;
    for (const auto& [id, count] : item.features[e]) {
      t += weights[id] * count;
    }
    theta[e] = t;
  }

  InsideOutsideTables tables = inside(net, theta);
  const EdgeMarginals marginals = outside_and_marginals(net, theta, tables);

  SentenceTerm term;
  double gold_score = 0.0;
  for (const std::uint32_t e : item.gold_edges) {
    gold_score += theta[e];
    for (const auto& [id, count] : item.features[e]) {
      term.increments.emplace_back(id, static_cast<double>(count));
    }
  }
  term.value = gold_score - tables.log_z;

  for (std::uint32_t e = 0; e < net.num_edges(); ++e) {
    const double p = marginals.p[e];
    if (p == 0.0) continue;
    for (const auto& [id, count] : item.features[e]) {
      term.increments.emplace_back(id, -p * count);
    }
  }
  return term;
}

}  // namespace

CompiledCorpus compile_corpus(const Corpus& corpus, const Model& model,
                              bool strict_gold, const BrownClusterMap* brown) {
  CompiledCorpus out;
  out.sentences.reserve(corpus.sentences.size());
  for (const Sentence& sentence : corpus.sentences) {
    Sentence copy = sentence;
    if (!strict_gold) {
      int dropped = 0;
      copy.mentions = reduce_mentions_for_scheme(model.scheme, sentence, &dropped);
      if (dropped > 0) {
        out.dropped_mentions += dropped;
        log::warn("sentence ", sentence.id, ": dropped ", dropped,
                  " mention(s) the ", to_string(model.scheme),
                  " scheme cannot represent");
      }
    }
    out.sentences.push_back(std::move(copy));
  }

  out.items.reserve(out.sentences.size());
  for (const Sentence& sentence : out.sentences) {
    CompiledSentence item;
    item.network = build_network(model.scheme, sentence, model.label_set);
    attach_penalty(item.network);
    item.features.reserve(item.network.num_edges());
    for (std::uint32_t e = 0; e < item.network.num_edges(); ++e) {
      item.features.push_back(edge_features(
          item.network, e, model.dictionary, model.feature_config, brown));
    }
    item.gold_edges = gold_structure(item.network, sentence).chosen_edges();
    out.items.push_back(std::move(item));
  }
  return out;
}

double objective_and_gradient(const CompiledCorpus& compiled,
                              const std::vector<double>& weights,
                              double lambda, int threads,
                              std::vector<double>& grad) {
  grad.assign(weights.size(), 0.0);
  std::vector<SentenceTerm> terms(compiled.items.size());
  parallel_for(compiled.items.size(), threads, [&](std::size_t i) {
    terms[i] = sentence_term(compiled.items[i], weights);
  });

  double value = 0.0;
  for (const SentenceTerm& term : terms) {
    value += term.value;
    for (const auto& [id, delta] : term.increments) grad[id] += delta;
  }
  if (lambda > 0.0) {
    double squared = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      squared += weights[i] * weights[i];
      grad[i] -= 2.0 * lambda * weights[i];
    }
    value -= lambda * squared;
  }
  return value;
}

std::pair<double, std::vector<double>> objective_and_gradient(
    const Corpus& corpus, const Model& model, double lambda,
    const BrownClusterMap* brown) {
  const CompiledCorpus compiled = compile_corpus(corpus, model, false, brown);
  std::vector<double> grad;
  const double value =
      objective_and_gradient(compiled, model.weights, lambda, 1, grad);
  return {value, std::move(grad)};
}

TrainResult train(const Corpus& corpus, ModelScheme scheme,
                  const FeatureConfig& feature_config,
                  const TrainConfig& config, const BrownClusterMap* brown) {
  if (corpus.sentences.empty()) {
    throw DataError("cannot train on an empty corpus");
  }
  if (config.lambda < 0.0) {
    throw DataError("negative l2 coefficient");
  }

  TrainResult result;
  Model& model = result.model;
  model.scheme = scheme;
  model.feature_config = feature_config;
  model.label_set = corpus.label_set;
  model.dictionary = build_dictionary(corpus, scheme, feature_config, brown);
  model.weights.assign(model.dictionary.size(), 0.0);

  const CompiledCorpus compiled =
      compile_corpus(corpus, model, config.strict_gold, brown);
  result.dropped_mentions = compiled.dropped_mentions;

  const Timer timer;
  const ObjectiveFn negated = [&](const std::vector<double>& w,
                                  std::vector<double>& g) {
    const double value =
        objective_and_gradient(compiled, w, config.lambda, config.threads, g);
    for (double& gi : g) gi = -gi;
    return -value;
  };

  {
    std::vector<double> g0;
    const double v0 = objective_and_gradient(compiled, model.weights,
                                             config.lambda, config.threads, g0);
    result.reports.push_back({0, v0, l2_norm(g0), timer.seconds()});
  }

  LbfgsConfig lbfgs;
  lbfgs.max_iterations = config.max_iterations;
  lbfgs.grad_tolerance = config.grad_tolerance;
  lbfgs.history = config.history;
  const LbfgsResult opt = minimize(
      negated, model.weights, lbfgs,
      [&](int iteration, double value, double grad_norm,
          const std::vector<double>&) {
        result.reports.push_back({iteration, -value, grad_norm, timer.seconds()});
      });
  if (opt.line_search_failed) {
    log::warn("line search failed after ", opt.iterations,
              " iteration(s); keeping the best iterate");
  }

  model.weights = opt.x;
  result.converged = opt.converged;
  result.line_search_failed = opt.line_search_failed;
  return result;
}

double finite_difference_check(const Corpus& corpus, const Model& model,
                               double lambda, double epsilon,
                               const BrownClusterMap* brown) {
  if (!(epsilon > 0.0)) {
    throw DataError("finite-difference step must be positive");
  }
  const CompiledCorpus compiled = compile_corpus(corpus, model, false, brown);
  std::vector<double> grad;
  objective_and_gradient(compiled, model.weights, lambda, 1, grad);

  std::vector<double> w = model.weights;
  std::vector<double> scratch;
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double keep = w[i];
    w[i] = keep + epsilon;
    const double up = objective_and_gradient(compiled, w, lambda, 1, scratch);
    w[i] = keep - epsilon;
    const double down = objective_and_gradient(compiled, w, lambda, 1, scratch);
    w[i] = keep;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double scale = std::max({1.0, std::abs(numeric), std::abs(grad[i])});
    worst = std::max(worst, std::abs(numeric - grad[i]) / scale);
  }
  return worst;
}

}  // namespace sepmark
