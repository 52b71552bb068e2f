#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sepmark/network.hpp"

namespace sepmark::demos {

// A three-word mention hypergraph cut down to six optional hyperedges,
// named A through F. The interior node reached by both A and B has three
// outgoing choices, so the dynamic program counts 3x3 combinations while
// only the three consistent ones are real hyperpaths.
struct RestrictedHypergraph {
  Network network;
  std::array<std::uint32_t, 6> named_edges;  // edge ids of A..F
};

RestrictedHypergraph build_restricted_hypergraph();

struct BranchCombination {
  char label;        // 'a'..'i', row-major over {C,D,E} x {C,D,E}
  char upper_pick;   // choice seen from the branch entered through edge A
  char lower_pick;   // choice seen from the branch entered through edge B
  bool valid;        // real hyperpath: both branches pick the same edge
};

struct SpuriousReport {
  double dp_log_z = 0.0;
  double true_log_z = 0.0;
  double spurious_mass = 0.0;  // exp(dp) - exp(true)
  long long dp_combination_terms = 0;
  std::vector<std::string> valid_hyperpaths;  // e.g. "{A,B,C,F}"
  std::array<BranchCombination, 9> combinations;
};

// Runs both normalizations on the restricted graph. `weights` assigns
// potentials to the named edges A..F (scaffolding always scores 0);
// omitted weights mean unit potentials.
SpuriousReport demo_spurious(
    const std::optional<std::array<double, 6>>& weights = std::nullopt);

void render_spurious(const SpuriousReport& report, std::ostream& out);

struct UniquenessReport {
  int n = 0;
  std::uint64_t span_sets = 0;         // 2^(n(n+1)/2)
  std::uint64_t image_size = 0;        // distinct encoded sequences
  std::uint64_t valid_sequences = 0;   // enumerated
  std::uint64_t transfer_count = 0;    // closed-form count
  bool encode_total = false;           // every span set encoded
  bool all_encodings_valid = false;
};

// Exhaustively checks that every span subset of an n-word sentence encodes
// to exactly one valid separator sequence, and how many sequences the
// encoding map covers. Throws CapacityError for n > 5.
UniquenessReport demo_uniqueness(int n);

void render_uniqueness(const UniquenessReport& report, std::ostream& out);

}  // namespace sepmark::demos
