#pragma once

#include <cstdint>

#include "sepmark/corpus.hpp"

namespace sepmark {

// Deterministic toy corpus over a closed ~50-word vocabulary with two types.
// Mentions are word-identified patterns, some nested within the same type,
// so separator schemes can learn the corpus exactly while single-chain
// taggers hit a representability ceiling.
struct SynthConfig {
  int sentences = 500;
  int min_length = 6;
  int max_length = 12;
  int nested_percent = 40;  // share of sentences seeded with a nested pattern
  std::uint64_t seed = 1;
};

Corpus make_synthetic_corpus(const SynthConfig& config);

}  // namespace sepmark
