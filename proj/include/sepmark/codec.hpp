#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sepmark::codec {

// A sentence of n words has n+1 gaps: one before each word and one after the
// last word. Each gap is labeled with a separator that records three facts
// about the mentions of one entity type:
//
//   S  a mention starts at the word right of the gap
//   E  a mention ends at the word left of the gap
//   C  a mention spans the gap (covers the words on both sides)
//
// The eight separators are the subsets of {S,E,C}:
enum class Separator : std::uint8_t { X = 0, S, E, ES, C, CS, EC, ECS };

inline constexpr int kNumSeparators = 8;

constexpr bool has_start(Separator s) {
  return s == Separator::S || s == Separator::ES || s == Separator::CS ||
         s == Separator::ECS;
}
constexpr bool has_end(Separator s) {
  return s == Separator::E || s == Separator::ES || s == Separator::EC ||
         s == Separator::ECS;
}
constexpr bool has_continue(Separator s) {
  return s == Separator::C || s == Separator::CS || s == Separator::EC ||
         s == Separator::ECS;
}

// Whether the word to the right (left) of a gap is inside some mention.
constexpr bool next_in(Separator s) { return has_start(s) || has_continue(s); }
constexpr bool prev_in(Separator s) { return has_end(s) || has_continue(s); }

Separator separator_from_flags(bool start, bool end, bool cont);
std::string_view name(Separator s);
std::optional<Separator> parse_separator(std::string_view text);

// A [start, end] word span, 0-based and inclusive on both sides.
struct Span {
  int start = 0;
  int end = 0;
  auto operator<=>(const Span&) const = default;
};

// Sorted and duplicate-free.
using SpanSet = std::vector<Span>;

struct SeparatorSequence {
  std::vector<Separator> gaps;  // n+1 entries for an n-word sentence
  std::string label;            // optional mention-type tag, informational

  int tokens() const { return static_cast<int>(gaps.size()) - 1; }
  bool operator==(const SeparatorSequence& o) const { return gaps == o.gaps; }
};

// Projects a span set onto the n+1 gap labels. Total: every span set,
// including crossing and same-type overlapping ones, has an encoding.
SeparatorSequence encode(int n_tokens, const SpanSet& spans);

// A sequence is valid when the boundary gaps carry no E/C (first) and no
// S/C (last), and adjacent gaps agree on whether the word between them is
// inside a mention: next_in(gaps[g]) == prev_in(gaps[g+1]).
bool is_valid(const SeparatorSequence& seq);
std::optional<int> first_invalid_gap(const SeparatorSequence& seq);

// Recovers a span set from a valid sequence. Where the labels are ambiguous
// the spans are resolved as nested: a stack of open starts is kept, an E
// without C closes every open span, an E with C closes only the innermost
// one (unless that would leave the remaining C unexplained, which is the
// shared-start case: the open span then also continues).
//
// interpret is a right inverse of encode: encode(n, interpret(q)) == q for
// every valid q, and the result never contains crossing spans.
SpanSet interpret(const SeparatorSequence& seq);  // throws InvalidSequenceError

// encode followed by interpret: maps an arbitrary span set to the unique
// non-crossing set with the same gap profile. Idempotent; the identity on
// span sets that are already nested/disjoint.
SpanSet canonicalize_nested(int n_tokens, const SpanSet& spans);

// in_mention_profile(seq)[k] is true when word k lies inside some mention.
std::vector<bool> in_mention_profile(const SeparatorSequence& seq);

// All valid sequences for n words in lexicographic order (X < S < E < ES <
// C < CS < EC < ECS). Guarded for n <= 8; the count grows geometrically.
std::vector<SeparatorSequence> enumerate_valid_sequences(int n_tokens);

// Closed-form count of valid sequences: two path states per word (outside /
// inside a mention), one way to cross a gap outside-outside or in either
// mixed direction, and five ways inside-inside.
std::uint64_t valid_sequence_count(int n_tokens);

std::string to_string(const SeparatorSequence& seq);  // e.g. "X S CS EC E"
std::optional<SeparatorSequence> sequence_from_string(std::string_view text);

bool spans_cross(const Span& a, const Span& b);
bool has_crossing(const SpanSet& spans);

}  // namespace sepmark::codec
