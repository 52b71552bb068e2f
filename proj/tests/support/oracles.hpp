#pragma once

// Test-side oracles, written independently of the library code paths they
// check. Keep these brute-force and boring.

#include <cstdint>
#include <vector>

#include "sepmark/codec.hpp"

namespace oracles {

// All (start, end) spans of an n-word sentence, in a fixed order so that a
// bitmask enumerates every span subset.
inline std::vector<sepmark::codec::Span> all_spans(int n) {
  std::vector<sepmark::codec::Span> spans;
  for (int s = 0; s < n; ++s) {
    for (int e = s; e < n; ++e) spans.push_back({s, e});
  }
  return spans;
}

inline sepmark::codec::SpanSet subset_from_mask(
    const std::vector<sepmark::codec::Span>& spans, std::uint64_t mask) {
  sepmark::codec::SpanSet out;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (mask & (std::uint64_t{1} << i)) out.push_back(spans[i]);
  }
  return out;
}

// Literal gap-flag evaluation, one flag at a time.
inline sepmark::codec::SeparatorSequence encode_by_definition(
    int n, const sepmark::codec::SpanSet& spans) {
  sepmark::codec::SeparatorSequence seq;
  for (int g = 0; g <= n; ++g) {
    bool start = false, end = false, cont = false;
    for (const auto& sp : spans) {
      if (sp.start == g) start = true;
      if (sp.end == g - 1) end = true;
      if (sp.start <= g - 1 && sp.end >= g) cont = true;
    }
    seq.gaps.push_back(sepmark::codec::separator_from_flags(start, end, cont));
  }
  return seq;
}

// Transfer-matrix count of valid sequences: row vector (1 1), the matrix
// [[1 1] [1 5]] once per interior gap, column vector (1 1).
inline std::uint64_t transfer_matrix_count(int n) {
  std::uint64_t v[2] = {1, 1};
  for (int k = 1; k < n; ++k) {
    std::uint64_t o = v[0] * 1 + v[1] * 1;
    std::uint64_t i = v[0] * 1 + v[1] * 5;
    v[0] = o;
    v[1] = i;
  }
  return v[0] + v[1];
}

}  // namespace oracles
