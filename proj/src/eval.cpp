#include "sepmark/eval.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <random>
#include <utility>

#include "sepmark/error.hpp"
#include "sepmark/inference.hpp"
#include "sepmark/network.hpp"
#include "sepmark/util.hpp"

namespace sepmark {

namespace {

std::vector<Mention> deduped(std::vector<Mention> mentions) {
  std::sort(mentions.begin(), mentions.end());
  mentions.erase(std::unique(mentions.begin(), mentions.end()),
                 mentions.end());
  return mentions;
}

std::int64_t count_matches(const std::vector<Mention>& gold,
                           const std::vector<Mention>& pred) {
  std::int64_t hits = 0;
  auto g = gold.begin();
  for (const Mention& m : pred) {
    while (g != gold.end() && *g < m) ++g;
    if (g != gold.end() && *g == m) ++hits;
  }
  return hits;
}

struct SentenceCounts {
  std::int64_t tp = 0;
  std::int64_t pred = 0;
  std::int64_t gold = 0;
};

std::vector<SentenceCounts> per_sentence_counts(
    const Corpus& gold, const std::vector<std::vector<Mention>>& predicted) {
  if (gold.sentences.size() != predicted.size()) {
    throw DataError("scoring needs one prediction list per sentence: " +
                    std::to_string(gold.sentences.size()) + " sentences vs " +
                    std::to_string(predicted.size()) + " prediction lists");
  }
  std::vector<SentenceCounts> counts(gold.sentences.size());
  for (std::size_t i = 0; i < gold.sentences.size(); ++i) {
    std::vector<Mention> g = deduped(gold.sentences[i].mentions);
    std::vector<Mention> p = deduped(predicted[i]);
    counts[i].tp = count_matches(g, p);
    counts[i].pred = static_cast<std::int64_t>(p.size());
    counts[i].gold = static_cast<std::int64_t>(g.size());
  }
  return counts;
}

PRF prf_of(const std::vector<SentenceCounts>& counts) {
  std::int64_t tp = 0, pred = 0, gold = 0;
  for (const SentenceCounts& c : counts) {
    tp += c.tp;
    pred += c.pred;
    gold += c.gold;
  }
  return compute_prf(tp, pred, gold);
}

void check_weights(const Model& model) {
  if (model.weights.size() != model.dictionary.size()) {
    throw DataError("model has " + std::to_string(model.weights.size()) +
                    " weights for a dictionary of " +
                    std::to_string(model.dictionary.size()) + " features");
  }
}

// A sentence's network and per-edge features, built once so that penalty
// sweeps only redo the dot products and the decode.
struct CompiledNet {
  Network net;
  std::vector<SparseFeatureVector> feats;
};

CompiledNet compile_for_decode(const Model& model, const Sentence& sentence,
                               const BrownClusterMap* brown) {
  CompiledNet c;
  c.net = build_network(model.scheme, sentence, model.label_set);
  attach_penalty(c.net);
  c.feats.resize(c.net.num_edges());
  for (std::uint32_t e = 0; e < c.net.num_edges(); ++e) {
    c.feats[e] = edge_features(c.net, e, model.dictionary,
                               model.feature_config, brown);
  }
  return c;
}

std::vector<Mention> decode_compiled(const CompiledNet& c,
                                     const std::vector<double>& weights) {
  std::vector<double> theta(c.net.num_edges(), 0.0);
  for (std::uint32_t e = 0; e < c.net.num_edges(); ++e) {
    for (auto [id, count] : c.feats[e]) theta[e] += weights[id] * count;
  }
  return read_structure(decode(c.net, theta).structure);
}

std::string format_double(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, value);
  return buf;
}

}  // namespace

PRF compute_prf(std::int64_t true_positives, std::int64_t num_predicted,
                std::int64_t num_gold) {
  PRF out;
  out.true_positives = true_positives;
  out.num_predicted = num_predicted;
  out.num_gold = num_gold;
  out.precision = num_predicted > 0
                      ? static_cast<double>(true_positives) / num_predicted
                      : (num_gold == 0 ? 1.0 : 0.0);
  out.recall =
      num_gold > 0 ? static_cast<double>(true_positives) / num_gold : 1.0;
  double sum = out.precision + out.recall;
  out.f1 = sum > 0.0 ? 2.0 * out.precision * out.recall / sum : 0.0;
  return out;
}

PRF score(const Corpus& gold,
          const std::vector<std::vector<Mention>>& predicted) {
  return prf_of(per_sentence_counts(gold, predicted));
}

PRF score(const Corpus& gold, const Corpus& predicted) {
  if (gold.sentences.size() != predicted.sentences.size()) {
    throw DataError("misaligned corpora: " +
                    std::to_string(gold.sentences.size()) + " vs " +
                    std::to_string(predicted.sentences.size()) + " sentences");
  }
  std::vector<std::vector<Mention>> lists;
  lists.reserve(predicted.sentences.size());
  for (std::size_t i = 0; i < gold.sentences.size(); ++i) {
    if (gold.sentences[i].size() != predicted.sentences[i].size()) {
      throw DataError("misaligned corpora: sentence " + std::to_string(i) +
                      " has " + std::to_string(gold.sentences[i].size()) +
                      " vs " + std::to_string(predicted.sentences[i].size()) +
                      " words");
    }
    lists.push_back(predicted.sentences[i].mentions);
  }
  return score(gold, lists);
}

SignificanceResult bootstrap_significance(
    const Corpus& gold, const std::vector<std::vector<Mention>>& pred_a,
    const std::vector<std::vector<Mention>>& pred_b, int replicates,
    std::uint64_t seed) {
  if (replicates < 1000) {
    throw DataError("bootstrap needs at least 1000 replicates, got " +
                    std::to_string(replicates));
  }
  std::vector<SentenceCounts> a = per_sentence_counts(gold, pred_a);
  std::vector<SentenceCounts> b = per_sentence_counts(gold, pred_b);

  SignificanceResult out;
  out.f1_a = prf_of(a).f1;
  out.f1_b = prf_of(b).f1;
  out.replicates = replicates;
  double d = out.f1_a - out.f1_b;
  if (d == 0.0) {
    out.p_value = 1.0;
    return out;
  }

  std::mt19937_64 rng(seed);
  const std::size_t n = a.size();
  int flips = 0;
  for (int r = 0; r < replicates; ++r) {
    std::int64_t tp_a = 0, pred_count_a = 0;
    std::int64_t tp_b = 0, pred_count_b = 0;
    std::int64_t gold_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = static_cast<std::size_t>(rng() % n);
      tp_a += a[j].tp;
      pred_count_a += a[j].pred;
      tp_b += b[j].tp;
      pred_count_b += b[j].pred;
      gold_count += a[j].gold;
    }
    double dr = compute_prf(tp_a, pred_count_a, gold_count).f1 -
                compute_prf(tp_b, pred_count_b, gold_count).f1;
    if ((d > 0.0 && dr <= 0.0) || (d < 0.0 && dr >= 0.0)) ++flips;
  }
  out.p_value = static_cast<double>(flips) / replicates;
  return out;
}

std::vector<Mention> predict_sentence(const Model& model,
                                      const Sentence& sentence,
                                      const BrownClusterMap* brown) {
  check_weights(model);
  if (sentence.tokens.empty()) return {};
  std::vector<double> w = model.weights;
  w[kPenaltyFeature] += model.penalty_offset;
  return decode_compiled(compile_for_decode(model, sentence, brown), w);
}

Corpus predict_corpus(const Model& model, const Corpus& corpus,
                      const BrownClusterMap* brown, int threads) {
  check_weights(model);
  std::vector<double> w = model.weights;
  w[kPenaltyFeature] += model.penalty_offset;

  std::vector<std::vector<Mention>> slots(corpus.sentences.size());
  parallel_for(corpus.sentences.size(), threads, [&](std::size_t i) {
    const Sentence& sentence = corpus.sentences[i];
    if (sentence.tokens.empty()) return;
    slots[i] = decode_compiled(compile_for_decode(model, sentence, brown), w);
  });

  Corpus out = corpus;
  for (std::size_t i = 0; i < out.sentences.size(); ++i) {
    out.sentences[i].mentions = std::move(slots[i]);
  }
  out.rebuild_label_set();
  return out;
}

PenaltySweep tune_penalty(Model& model, const Corpus& dev,
                          const PenaltyGrid& grid,
                          const BrownClusterMap* brown, int threads) {
  check_weights(model);
  if (grid.hi < grid.lo) {
    throw DataError("penalty grid is empty: lo " + format_double("%g", grid.lo) +
                    " > hi " + format_double("%g", grid.hi));
  }
  if (grid.hi > grid.lo && grid.step <= 0.0) {
    throw DataError("penalty grid step must be positive");
  }

  std::vector<double> offsets;
  double tol = (grid.step > 0.0 ? grid.step : 1.0) * 1e-9;
  for (int i = 0;; ++i) {
    double c = grid.lo + i * grid.step;
    if (c > grid.hi + tol) break;
    if (std::abs(c) < tol) c = 0.0;  // keep the zero point exact
    offsets.push_back(c);
    if (grid.step <= 0.0) break;
  }

  std::vector<CompiledNet> nets(dev.sentences.size());
  parallel_for(dev.sentences.size(), threads, [&](std::size_t i) {
    if (dev.sentences[i].tokens.empty()) return;
    nets[i] = compile_for_decode(model, dev.sentences[i], brown);
  });

  PenaltySweep sweep;
  std::vector<std::vector<Mention>> slots(dev.sentences.size());
  for (double c : offsets) {
    std::vector<double> w = model.weights;
    w[kPenaltyFeature] += c;
    parallel_for(dev.sentences.size(), threads, [&](std::size_t i) {
      slots[i] =
          dev.sentences[i].tokens.empty() ? std::vector<Mention>{}
                                          : decode_compiled(nets[i], w);
    });

    PenaltyPoint point;
    point.offset = c;
    point.prf = score(dev, slots);
    for (const std::vector<Mention>& s : slots) {
      point.predicted_mentions += static_cast<std::int64_t>(s.size());
    }
    if (!sweep.points.empty()) {
      // A larger shared bonus can only grow the decoded mention count.
      assert(point.predicted_mentions >=
             sweep.points.back().predicted_mentions);
    }
    sweep.points.push_back(std::move(point));
  }

  const PenaltyPoint* best = &sweep.points.front();
  for (const PenaltyPoint& point : sweep.points) {
    if (point.prf.f1 > best->prf.f1 ||
        (point.prf.f1 == best->prf.f1 &&
         (std::abs(point.offset) < std::abs(best->offset) ||
          (std::abs(point.offset) == std::abs(best->offset) &&
           point.offset < best->offset)))) {
      best = &point;
    }
  }
  sweep.chosen = best->offset;
  sweep.chosen_prf = best->prf;
  model.penalty_offset = sweep.chosen;
  return sweep;
}

ThroughputReport throughput(const Model& model, const Corpus& corpus,
                            const BrownClusterMap* brown) {
  check_weights(model);
  if (corpus.word_count() == 0) {
    throw DataError("cannot measure throughput: the corpus has no words");
  }
  std::vector<double> w = model.weights;
  w[kPenaltyFeature] += model.penalty_offset;

  Timer timer;
  std::int64_t words = 0;
  for (const Sentence& sentence : corpus.sentences) {
    if (sentence.tokens.empty()) continue;
    decode_compiled(compile_for_decode(model, sentence, brown), w);
    words += sentence.size();
  }
  ThroughputReport out;
  out.total_words = words;
  out.wall_seconds = timer.seconds();
  out.words_per_second = words / std::max(out.wall_seconds, 1e-12);
  return out;
}

std::string render_prf(const PRF& prf) {
  std::string out;
  out += "TP " + std::to_string(prf.true_positives) + "\n";
  out += "pred " + std::to_string(prf.num_predicted) + "\n";
  out += "gold " + std::to_string(prf.num_gold) + "\n";
  out += "P " + format_double("%.6f", prf.precision) + "\n";
  out += "R " + format_double("%.6f", prf.recall) + "\n";
  out += "F1 " + format_double("%.6f", prf.f1) + "\n";
  return out;
}

std::string render_sweep(const PenaltySweep& sweep) {
  std::string out;
  for (const PenaltyPoint& point : sweep.points) {
    out += "c " + format_double("%.4g", point.offset);
    out += " P " + format_double("%.6f", point.prf.precision);
    out += " R " + format_double("%.6f", point.prf.recall);
    out += " F1 " + format_double("%.6f", point.prf.f1);
    out += " predicted " + std::to_string(point.predicted_mentions) + "\n";
  }
  out += "chosen " + format_double("%.4g", sweep.chosen) + " F1 " +
         format_double("%.6f", sweep.chosen_prf.f1) + "\n";
  return out;
}

std::string render_throughput(const ThroughputReport& report) {
  std::string out;
  out += "words " + std::to_string(report.total_words) + "\n";
  out += "seconds " + format_double("%.6f", report.wall_seconds) + "\n";
  out += "words_per_second " + format_double("%.1f", report.words_per_second) +
         "\n";
  return out;
}

}  // namespace sepmark
