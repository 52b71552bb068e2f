#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sepmark/codec.hpp"
#include "sepmark/corpus.hpp"

namespace sepmark {

// The five sentence-level models. All of them score a sentence by summing
// per-edge potentials over a directed network rooted at a single node:
//
//   lcrf-single  one BILOU tag chain over all types; no overlap capacity
//   lcrf-multi   one BILOU tag chain per type; same-type overlap impossible
//   state        one chain per type whose states are the 8 gap separators
//   edge         one outside/inside chain per type with parallel edges
//                labeled by separators (8 edges between adjacent words)
//   hypergraph   the mention-hypergraph baseline with forking hyperedges;
//                its inside score deliberately sums spurious structures
enum class ModelScheme {
  LcrfSingle,
  LcrfMulti,
  State,
  Edge,
  Hypergraph,
};

std::string_view to_string(ModelScheme scheme);
std::optional<ModelScheme> scheme_from_string(std::string_view text);

enum class NodeKind : std::uint8_t {
  Root,
  Leaf,
  ChainStart,  // per-type entry point when a network has several chains
  Out,         // edge scheme: word outside any mention
  In,          // edge scheme: word inside a mention
  SepState,    // state scheme: a separator at a gap
  BilouState,  // lcrf schemes: a tag at a word
  HgA,         // hypergraph: mentions starting here or later
  HgE,         // hypergraph: mentions starting exactly here
  HgT,         // hypergraph: mentions of one type starting here
  HgI,         // hypergraph: mentions of one type covering this word
};

// pos: word index (or gap index for SepState); sub: separator or tag id;
// type: chain index. -1 where not applicable.
struct Node {
  NodeKind kind;
  std::int16_t pos = -1;
  std::int16_t sub = -1;
  std::int16_t type = -1;
};

// BILOU tag ids within one chain.
enum BilouTag : int { kTagO = 0, kTagB = 1, kTagI = 2, kTagL = 3, kTagU = 4 };

// Hyperedge kinds for the hypergraph scheme (`label` field).
enum HgEdgeKind : int {
  kHgScaffold = 0,  // A->(A,E), A->E, E->(T..): present in every structure
  kHgTSkip = 1,     // T->X   no mention of this type starts here
  kHgTStart = 2,    // T->I   a mention of this type starts here
  kHgIEnd = 3,      // I->X   every covering mention ends here
  kHgICont = 4,     // I->I   some covering mention continues
  kHgIBoth = 5,     // I->(I,X) one ends and another continues
};

// An edge from one parent to one or more children (children only fork in
// hypergraph scaffolding/forks and in the root junction that ties per-type
// chains together). `label` is scheme-specific: a Separator for edge/state
// schemes, a BilouTag for lcrf schemes, an HgEdgeKind for the hypergraph.
struct Edge {
  std::uint32_t parent = 0;
  std::uint32_t child_begin = 0;
  std::uint16_t child_count = 0;
  std::uint8_t label = 0;
  std::int16_t type = -1;
  bool penalty = false;
};

class Network {
 public:
  ModelScheme scheme = ModelScheme::Edge;
  int n_tokens = 0;
  int n_types = 0;
  const Sentence* sentence = nullptr;  // non-owning; must outlive the network
  std::vector<std::string> labels;     // type index -> label string

  // Nodes are stored in topological order: every edge satisfies
  // parent index < child index; node 0 is the root, the last node the leaf.
  std::vector<Node> nodes;
  std::vector<Edge> edges;  // grouped by parent, ascending
  std::vector<std::uint32_t> child_pool;
  std::vector<std::uint32_t> edge_begin;  // per node, size nodes()+1
  std::uint32_t root = 0;
  std::uint32_t leaf = 0;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_edges() const { return edges.size(); }
  std::span<const std::uint32_t> children(const Edge& e) const {
    return {child_pool.data() + e.child_begin, e.child_count};
  }
  std::pair<std::uint32_t, std::uint32_t> out_edges(std::uint32_t v) const {
    return {edge_begin[v], edge_begin[v + 1]};
  }

  std::string node_name(std::uint32_t v) const;
  std::string edge_label_name(const Edge& e) const;
  void dump(std::ostream& out) const;

  // Checks topological order, parent grouping, reachability from the root
  // and (except for boundary BILOU dead ends) leaf reachability.
  void validate() const;
};

// A concrete prediction or gold annotation: one chosen outgoing edge per
// node that participates in the structure, closed under edge children.
struct Structure {
  const Network* network = nullptr;
  std::vector<std::int32_t> choice;  // per node: edge id, or -1 if absent

  bool includes(std::uint32_t v) const { return choice[v] >= 0 || v == network->leaf; }
  std::vector<std::uint32_t> chosen_edges() const;  // ascending by parent
  double score(const std::vector<double>& theta) const;
};

bool is_valid_structure(const Structure& s);

Network build_network(ModelScheme scheme, const Sentence& sentence,
                      const std::vector<std::string>& label_set);

// Marks the edges that count predicted mentions, one unit each, so that a
// decode-time offset on the shared penalty weight trades precision against
// recall: incoming edges of B/U tags (lcrf), of separator states containing
// S (state), of In nodes (edge), and T->I hyperedges (hypergraph).
Network& attach_penalty(Network& network);

// The unique structure whose interpretation yields the sentence's mentions
// (canonicalized per type for the separator schemes). Throws CapacityError
// when the scheme cannot represent the annotation, naming an offending pair.
Structure gold_structure(const Network& network, const Sentence& sentence);

// Maps any valid structure back to mentions. Ambiguity in the separator and
// hypergraph schemes resolves exactly as codec::interpret does.
std::vector<Mention> read_structure(const Structure& structure);

// What a scheme can actually be trained on: drops mentions the scheme cannot
// represent (overlaps for the lcrf schemes), keeping the earliest-starting,
// longest span of each overlapping cluster. Returns the kept mentions;
// `dropped` (when given) receives the number removed.
std::vector<Mention> reduce_mentions_for_scheme(ModelScheme scheme,
                                                const Sentence& sentence,
                                                int* dropped = nullptr);

}  // namespace sepmark
