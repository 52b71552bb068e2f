#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sepmark/corpus.hpp"
#include "sepmark/features.hpp"
#include "sepmark/model.hpp"

namespace sepmark {

// Exact-match mention scoring. With nothing predicted, precision is 1 when
// the gold is also empty and 0 otherwise; recall is 1 on empty gold; F1 is 0
// whenever P + R is.
struct PRF {
  std::int64_t true_positives = 0;
  std::int64_t num_predicted = 0;
  std::int64_t num_gold = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

PRF compute_prf(std::int64_t true_positives, std::int64_t num_predicted,
                std::int64_t num_gold);

// Counts (start, end, label) matches per sentence; duplicate predictions
// collapse. Throws DataError when the lists are misaligned.
PRF score(const Corpus& gold,
          const std::vector<std::vector<Mention>>& predicted);
PRF score(const Corpus& gold, const Corpus& predicted);

struct SignificanceResult {
  double f1_a = 0.0;
  double f1_b = 0.0;
  double p_value = 1.0;
  int replicates = 0;
};

// Paired bootstrap over sentences: resample with replacement, count the
// replicates whose F1 difference is zero or flips sign against the full-data
// difference. Identical outputs define p = 1. Deterministic given the seed.
SignificanceResult bootstrap_significance(
    const Corpus& gold, const std::vector<std::vector<Mention>>& pred_a,
    const std::vector<std::vector<Mention>>& pred_b, int replicates,
    std::uint64_t seed);

// Decoding under the model, penalty offset included.
std::vector<Mention> predict_sentence(const Model& model,
                                      const Sentence& sentence,
                                      const BrownClusterMap* brown = nullptr);
Corpus predict_corpus(const Model& model, const Corpus& corpus,
                      const BrownClusterMap* brown = nullptr, int threads = 1);

struct PenaltyGrid {
  double lo = -2.0;
  double hi = 2.0;
  double step = 0.1;
};

struct PenaltyPoint {
  double offset = 0.0;
  PRF prf;
  std::int64_t predicted_mentions = 0;
};

struct PenaltySweep {
  std::vector<PenaltyPoint> points;
  double chosen = 0.0;
  PRF chosen_prf;
};

// Decodes the dev corpus once per grid offset added to the shared penalty
// weight, picks the best dev F1 (ties: smallest |c|, then smaller c) and
// stores it in model.penalty_offset.
PenaltySweep tune_penalty(Model& model, const Corpus& dev,
                          const PenaltyGrid& grid = {},
                          const BrownClusterMap* brown = nullptr,
                          int threads = 1);

struct ThroughputReport {
  double words_per_second = 0.0;
  std::int64_t total_words = 0;
  double wall_seconds = 0.0;
};

// Times the prediction pass (networks, features, decoding); model loading
// and corpus I/O stay outside the clock. Throws DataError on a corpus with
// no words.
ThroughputReport throughput(const Model& model, const Corpus& corpus,
                            const BrownClusterMap* brown = nullptr);

std::string render_prf(const PRF& prf);
std::string render_sweep(const PenaltySweep& sweep);
std::string render_throughput(const ThroughputReport& report);

}  // namespace sepmark
