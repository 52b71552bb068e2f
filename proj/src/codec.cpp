#include "sepmark/codec.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "sepmark/error.hpp"
#include "sepmark/util.hpp"

namespace sepmark::codec {

namespace {

constexpr std::array<std::string_view, 8> kNames = {"X",  "S",  "E",  "ES",
                                                    "C",  "CS", "EC", "ECS"};

// Index by (start | end<<1 | cont<<2).
constexpr std::array<Separator, 8> kFromFlags = {
    Separator::X,  Separator::S,  Separator::E,  Separator::ES,
    Separator::C,  Separator::CS, Separator::EC, Separator::ECS};

bool allowed_at(int gap, int n, Separator s) {
  if (gap == 0 && (has_end(s) || has_continue(s))) return false;
  if (gap == n && (has_start(s) || has_continue(s))) return false;
  return true;
}

}  // namespace

Separator separator_from_flags(bool start, bool end, bool cont) {
  return kFromFlags[(start ? 1 : 0) | (end ? 2 : 0) | (cont ? 4 : 0)];
}

std::string_view name(Separator s) { return kNames[static_cast<int>(s)]; }

std::optional<Separator> parse_separator(std::string_view text) {
  for (int i = 0; i < kNumSeparators; ++i) {
    if (kNames[i] == text) return static_cast<Separator>(i);
  }
  return std::nullopt;
}

SeparatorSequence encode(int n_tokens, const SpanSet& spans) {
  if (n_tokens < 0) throw std::invalid_argument("encode: negative token count");
  for (const Span& sp : spans) {
    if (sp.start < 0 || sp.end >= n_tokens || sp.end < sp.start) {
      throw std::invalid_argument("encode: span out of range");
    }
  }
  SeparatorSequence seq;
  seq.gaps.resize(static_cast<std::size_t>(n_tokens) + 1);
  for (int g = 0; g <= n_tokens; ++g) {
    bool start = false, end = false, cont = false;
    for (const Span& sp : spans) {
      start |= sp.start == g;
      end |= sp.end == g - 1;
      cont |= sp.start <= g - 1 && sp.end >= g;
    }
    seq.gaps[static_cast<std::size_t>(g)] = separator_from_flags(start, end, cont);
  }
  return seq;
}

std::optional<int> first_invalid_gap(const SeparatorSequence& seq) {
  const int n = seq.tokens();
  if (n < 0) return 0;
  for (int g = 0; g <= n; ++g) {
    if (!allowed_at(g, n, seq.gaps[static_cast<std::size_t>(g)])) return g;
  }
  for (int g = 0; g < n; ++g) {
    if (next_in(seq.gaps[static_cast<std::size_t>(g)]) !=
        prev_in(seq.gaps[static_cast<std::size_t>(g) + 1])) {
      return g + 1;
    }
  }
  return std::nullopt;
}

bool is_valid(const SeparatorSequence& seq) {
  return !first_invalid_gap(seq).has_value();
}

SpanSet interpret(const SeparatorSequence& seq) {
  if (auto bad = first_invalid_gap(seq)) {
    throw InvalidSequenceError(
        "invalid separator sequence at gap " + std::to_string(*bad), *bad);
  }
  const int n = seq.tokens();
  SpanSet out;
  std::vector<int> open;  // start positions, innermost on top
  for (int g = 0; g <= n; ++g) {
    const Separator s = seq.gaps[static_cast<std::size_t>(g)];
    if (has_end(s)) {
      if (!has_continue(s)) {
        for (int st : open) out.push_back({st, g - 1});
        open.clear();
      } else if (open.size() > 1) {
        out.push_back({open.back(), g - 1});
        open.pop_back();
      } else {
        // Shared start: the single open span both yields a mention ending
        // here and keeps running to explain the C flag.
        out.push_back({open.back(), g - 1});
      }
    }
    if (has_start(s)) open.push_back(g);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SpanSet canonicalize_nested(int n_tokens, const SpanSet& spans) {
  return interpret(encode(n_tokens, spans));
}

std::vector<bool> in_mention_profile(const SeparatorSequence& seq) {
  const int n = seq.tokens();
  std::vector<bool> profile(static_cast<std::size_t>(std::max(n, 0)));
  for (int k = 0; k < n; ++k) {
    profile[static_cast<std::size_t>(k)] =
        next_in(seq.gaps[static_cast<std::size_t>(k)]);
  }
  return profile;
}

std::vector<SeparatorSequence> enumerate_valid_sequences(int n_tokens) {
  if (n_tokens < 1 || n_tokens > 8) {
    throw std::invalid_argument(
        "enumerate_valid_sequences supports 1 <= n <= 8");
  }
  std::vector<SeparatorSequence> out;
  SeparatorSequence cur;
  cur.gaps.resize(static_cast<std::size_t>(n_tokens) + 1);
  auto rec = [&](auto&& self, int gap) -> void {
    if (gap > n_tokens) {
      out.push_back(cur);
      return;
    }
    for (int i = 0; i < kNumSeparators; ++i) {
      const Separator s = static_cast<Separator>(i);
      if (!allowed_at(gap, n_tokens, s)) continue;
      if (gap > 0 &&
          next_in(cur.gaps[static_cast<std::size_t>(gap) - 1]) != prev_in(s)) {
        continue;
      }
      cur.gaps[static_cast<std::size_t>(gap)] = s;
      self(self, gap + 1);
    }
  };
  rec(rec, 0);
  return out;
}

std::uint64_t valid_sequence_count(int n_tokens) {
  if (n_tokens < 0) throw std::invalid_argument("negative token count");
  if (n_tokens == 0) return 1;  // the lone gap must be X
  // One outside and one inside state per word; gap transitions
  // O->O 1 way, O->I 1way (S), I->O 1 way (E), I->I 5 ways (ES C CS EC ECS).
  std::uint64_t outside = 1, inside = 1;
  for (int k = 1; k < n_tokens; ++k) {
    std::uint64_t o = outside + inside;
    std::uint64_t i = outside + 5 * inside;
    outside = o;
    inside = i;
  }
  return outside + inside;
}

std::string to_string(const SeparatorSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.gaps.size(); ++i) {
    if (i > 0) out += ' ';
    out += name(seq.gaps[i]);
  }
  return out;
}

std::optional<SeparatorSequence> sequence_from_string(std::string_view text) {
  SeparatorSequence seq;
  for (std::string_view part : split_whitespace(text)) {
    auto s = parse_separator(part);
    if (!s) return std::nullopt;
    seq.gaps.push_back(*s);
  }
  if (seq.gaps.empty()) return std::nullopt;
  return seq;
}

bool spans_cross(const Span& a, const Span& b) {
  return (a.start < b.start && b.start <= a.end && a.end < b.end) ||
         (b.start < a.start && a.start <= b.end && b.end < a.end);
}

bool has_crossing(const SpanSet& spans) {
  for (std::size_t i = 0; i < spans.size(); ++i) {
    for (std::size_t j = i + 1; j < spans.size(); ++j) {
      if (spans_cross(spans[i], spans[j])) return true;
    }
  }
  return false;
}

}  // namespace sepmark::codec
