#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sepmark/network.hpp"

namespace sepmark {

// Per-node log scores. `outside` stays empty until the outside pass runs.
struct InsideOutsideTables {
  std::vector<double> inside;
  std::vector<double> outside;
  double log_z = 0.0;
};

// Per-edge posterior probability of appearing in a structure.
struct EdgeMarginals {
  std::vector<double> p;
};

struct DecodeResult {
  Structure structure;
  double score = 0.0;  // the structure's own log score, sum of its potentials
};

// Feature ids firing on an edge; repeated ids count multiply.
using EdgeFeatureFn = std::function<std::span<const std::uint32_t>(std::uint32_t)>;

// inside(v) = logsumexp over outgoing edges of theta(e) + sum of the
// children's inside scores. inside(leaf) is 0, log_z = inside(root). On the
// hypergraph scheme this knowingly sums spurious structures (the inflated
// partition function the demos exhibit); on the chain schemes it is exact.
InsideOutsideTables inside(const Network& network,
                           const std::vector<double>& theta);

// Fills tables.outside left to right and returns, for every edge,
// p(e) = exp(outside(parent) + theta(e) + sum inside(children) - log_z).
EdgeMarginals outside_and_marginals(const Network& network,
                                    const std::vector<double>& theta,
                                    InsideOutsideTables& tables);

// Expected feature counts: out[i] = sum over edges of p(e) * f_i(e).
std::vector<double> expected_features(const Network& network,
                                      const EdgeMarginals& marginals,
                                      std::size_t dimension,
                                      const EdgeFeatureFn& features_of);

// Max-product decoding. Ties go to the earliest declared edge at each node,
// which makes the result the lexicographically smallest optimal structure;
// with all-zero potentials every scheme decodes to its all-outside path.
DecodeResult decode(const Network& network, const std::vector<double>& theta);

// Enumeration oracles. Both walk every valid structure explicitly (each
// node expanded once per structure no matter how many chosen edges share
// it) and throw CapacityError beyond kEnumerationBound structures.
inline constexpr long long kEnumerationBound = 1'000'000;

// Visits every valid structure as a per-node choice vector plus its score,
// in the same lexicographic order the oracles use. The vector is reused
// between calls; copy it to keep a structure.
using StructureVisitor =
    std::function<void(const std::vector<std::int32_t>& choice, double score)>;
void for_each_structure(const Network& network,
                        const std::vector<double>& theta,
                        const StructureVisitor& visit);

double brute_force_log_z(const Network& network,
                         const std::vector<double>& theta);

// Highest-scoring structure under the same tie-break as decode.
DecodeResult brute_force_best(const Network& network,
                              const std::vector<double>& theta);

}  // namespace sepmark
