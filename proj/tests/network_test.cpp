#include "sepmark/network.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

#include "sepmark/error.hpp"
#include "support/oracles.hpp"

using namespace sepmark;
using codec::Separator;

namespace {

Sentence make_sentence(int n, std::vector<Mention> mentions) {
  Sentence s;
  s.id = "s";
  for (int k = 0; k < n; ++k) s.tokens.push_back({"w" + std::to_string(k), "-"});
  for (const Mention& m : mentions) s.add_mention(m);
  return s;
}

// Counts root-to-leaf derivations by dynamic programming. For the chain
// schemes every structure is counted exactly once; for the hypergraph this
// is the (possibly inflated) count that inside scores sum over.
long long dp_count(const Network& net) {
  std::vector<long long> cnt(net.num_nodes(), 0);
  cnt[net.leaf] = 1;
  for (std::uint32_t v = static_cast<std::uint32_t>(net.num_nodes()); v-- > 0;) {
    if (v == net.leaf) continue;
    auto [begin, end] = net.out_edges(v);
    for (std::uint32_t e = begin; e < end; ++e) {
      long long product = 1;
      for (std::uint32_t c : net.children(net.edges[e])) product *= cnt[c];
      cnt[v] += product;
    }
  }
  return cnt[net.root];
}

// Number of non-overlapping mention subsets of an n-word sentence with T
// interchangeable types, counted independently of any network.
long long nonoverlap_count(int n, int types) {
  std::vector<long long> f(static_cast<std::size_t>(n) + 1, 0);
  f[0] = 1;
  for (int k = 1; k <= n; ++k) {
    f[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(k) - 1];
    for (int j = 0; j < k; ++j) {
      f[static_cast<std::size_t>(k)] += types * f[static_cast<std::size_t>(j)];
    }
  }
  return f[static_cast<std::size_t>(n)];
}

int count_marked(const Network& net) {
  int total = 0;
  for (const Edge& e : net.edges) total += e.penalty ? 1 : 0;
  return total;
}

std::vector<Mention> roundtrip(ModelScheme scheme, const Sentence& s,
                               const std::vector<std::string>& labels) {
  Network net = build_network(scheme, s, labels);
  net.validate();
  Structure gold = gold_structure(net, s);
  REQUIRE(is_valid_structure(gold));
  return read_structure(gold);
}

}  // namespace

TEST_CASE("network: scheme names round-trip") {
  for (ModelScheme s : {ModelScheme::LcrfSingle, ModelScheme::LcrfMulti,
                        ModelScheme::State, ModelScheme::Edge,
                        ModelScheme::Hypergraph}) {
    auto back = scheme_from_string(to_string(s));
    REQUIRE(back.has_value());
    CHECK(*back == s);
  }
  CHECK(!scheme_from_string("lcrf").has_value());
  CHECK(to_string(ModelScheme::Edge) == "edge");
  CHECK(to_string(ModelScheme::LcrfSingle) == "lcrf-single");
}

TEST_CASE("network: edge scheme layout for two words, one type") {
  Sentence s = make_sentence(2, {});
  Network net = build_network(ModelScheme::Edge, s, {"T"});
  net.validate();
  // root, O/I per word, leaf
  CHECK(net.num_nodes() == 6);
  CHECK(net.num_edges() == 12);
  CHECK(net.nodes[net.root].kind == NodeKind::Root);
  CHECK(net.nodes[net.leaf].kind == NodeKind::Leaf);

  // the root offers X to the out node before S to the in node, so an
  // all-zero decode walks the all-outside path
  auto [rb, re] = net.out_edges(net.root);
  REQUIRE(re - rb == 2);
  CHECK(net.edges[rb].label == static_cast<int>(Separator::X));
  CHECK(net.nodes[net.child_pool[net.edges[rb].child_begin]].kind == NodeKind::Out);
  CHECK(net.edges[rb + 1].label == static_cast<int>(Separator::S));
  CHECK(net.nodes[net.child_pool[net.edges[rb + 1].child_begin]].kind == NodeKind::In);

  // between adjacent words: O->O X, O->I S, I->O E, I->I {ES,C,CS,EC,ECS}
  int in_to_in = 0;
  for (const Edge& e : net.edges) {
    const Node& p = net.nodes[e.parent];
    const Node& c = net.nodes[net.child_pool[e.child_begin]];
    if (p.kind == NodeKind::In && c.kind == NodeKind::In) {
      ++in_to_in;
      CHECK(codec::prev_in(static_cast<Separator>(e.label)));
      CHECK(codec::next_in(static_cast<Separator>(e.label)));
    }
  }
  CHECK(in_to_in == 5);
}

TEST_CASE("network: penalty marking") {
  SUBCASE("edge scheme marks every edge entering an in node") {
    Sentence s = make_sentence(2, {});
    Network net = build_network(ModelScheme::Edge, s, {"T"});
    attach_penalty(net);
    CHECK(count_marked(net) == 7);  // root->I0, O0->I1, and the five I0->I1
    for (const Edge& e : net.edges) {
      const bool into_in =
          net.nodes[net.child_pool[e.child_begin]].kind == NodeKind::In;
      CHECK(e.penalty == into_in);
    }
  }
  SUBCASE("state scheme marks edges entering S-flag states") {
    Sentence s = make_sentence(1, {});
    Network net = build_network(ModelScheme::State, s, {"T"});
    attach_penalty(net);
    CHECK(count_marked(net) == 1);  // root -> S at gap 0
    for (const Edge& e : net.edges) {
      if (!e.penalty) continue;
      const Node& c = net.nodes[net.child_pool[e.child_begin]];
      CHECK(c.kind == NodeKind::SepState);
      CHECK(codec::has_start(static_cast<Separator>(c.sub)));
    }
  }
  SUBCASE("lcrf marks edges entering B and U tags") {
    Sentence s = make_sentence(1, {});
    Network net = build_network(ModelScheme::LcrfSingle, s, {"T"});
    attach_penalty(net);
    CHECK(count_marked(net) == 2);  // root->B and root->U
  }
  SUBCASE("hypergraph marks mention-start hyperedges") {
    Sentence s = make_sentence(1, {});
    Network net = build_network(ModelScheme::Hypergraph, s, {"T"});
    attach_penalty(net);
    CHECK(count_marked(net) == 1);
    for (const Edge& e : net.edges) {
      if (e.penalty) CHECK(e.label == kHgTStart);
    }
  }
}

TEST_CASE("network: lcrf single keeps boundary dead ends") {
  Sentence s = make_sentence(1, {});
  Network net = build_network(ModelScheme::LcrfSingle, s, {"T"});
  net.validate();
  // root, O, B, U (I and L are impossible at the first word), leaf
  CHECK(net.num_nodes() == 5);
  auto [rb, re] = net.out_edges(net.root);
  CHECK(re - rb == 3);
  // B cannot reach the leaf on a one-word sentence yet stays in the network
  bool saw_b = false;
  for (std::uint32_t v = 0; v < net.num_nodes(); ++v) {
    if (net.nodes[v].kind != NodeKind::BilouState) continue;
    if (net.node_name(v) == "Tag(0,B-T)") {
      saw_b = true;
      auto [b, e] = net.out_edges(v);
      CHECK(b == e);
    }
  }
  CHECK(saw_b);
}

TEST_CASE("network: hypergraph layout for one word, one type") {
  Sentence s = make_sentence(1, {});
  Network net = build_network(ModelScheme::Hypergraph, s, {"T"});
  net.validate();
  CHECK(net.num_nodes() == 5);  // A, E, T, I, leaf
  CHECK(net.num_edges() == 5);
  CHECK(net.nodes[net.root].kind == NodeKind::HgA);
  CHECK(dp_count(net) == 2);
}

TEST_CASE("network: structure counts match the sequence count") {
  for (int n = 1; n <= 5; ++n) {
    Sentence s = make_sentence(n, {});
    const long long expected = oracles::transfer_matrix_count(n);
    for (ModelScheme scheme : {ModelScheme::Edge, ModelScheme::State}) {
      Network net = build_network(scheme, s, {"T"});
      net.validate();
      CHECK(dp_count(net) == expected);
    }
  }
}

TEST_CASE("network: multiple chains multiply the structure count") {
  Sentence s = make_sentence(2, {});
  for (ModelScheme scheme : {ModelScheme::Edge, ModelScheme::State}) {
    Network net = build_network(scheme, s, {"A", "B"});
    net.validate();
    // the root carries a single junction edge with one entry per type
    auto [rb, re] = net.out_edges(net.root);
    REQUIRE(re - rb == 1);
    REQUIRE(net.edges[rb].child_count == 2);
    for (std::uint32_t c : net.children(net.edges[rb])) {
      CHECK(net.nodes[c].kind == NodeKind::ChainStart);
    }
    CHECK(dp_count(net) == 64);  // 8 * 8
  }
}

TEST_CASE("network: lcrf structure counts match non-overlapping subsets") {
  for (int n = 1; n <= 4; ++n) {
    for (int types = 1; types <= 2; ++types) {
      std::vector<std::string> labels;
      for (int t = 0; t < types; ++t) labels.push_back(std::string(1, char('A' + t)));
      Sentence s = make_sentence(n, {});
      Network single = build_network(ModelScheme::LcrfSingle, s, labels);
      single.validate();
      CHECK(dp_count(single) == nonoverlap_count(n, types));
      Network multi = build_network(ModelScheme::LcrfMulti, s, labels);
      multi.validate();
      long long per_chain = nonoverlap_count(n, 1);
      long long want = 1;
      for (int t = 0; t < types; ++t) want *= per_chain;
      CHECK(dp_count(multi) == want);
    }
  }
}

TEST_CASE("network: hypergraph inside count inflates at three words") {
  Sentence s2 = make_sentence(2, {});
  Network net2 = build_network(ModelScheme::Hypergraph, s2, {"T"});
  CHECK(dp_count(net2) == 8);  // equal to the true count at two words

  Sentence s3 = make_sentence(3, {});
  Network net3 = build_network(ModelScheme::Hypergraph, s3, {"T"});
  net3.validate();
  CHECK(dp_count(net3) == 64);  // true count is 40
  CHECK(oracles::transfer_matrix_count(3) == 40);
}

TEST_CASE("network: gold structures round-trip through reading") {
  SUBCASE("nested same-type mentions") {
    Sentence s = make_sentence(4, {{1, 3, "PROT"}, {2, 2, "PROT"}});
    for (ModelScheme scheme : {ModelScheme::Edge, ModelScheme::State,
                               ModelScheme::Hypergraph}) {
      auto got = roundtrip(scheme, s, {"PROT"});
      CHECK(got == s.mentions);
    }
  }
  SUBCASE("shared start") {
    Sentence s = make_sentence(4, {{1, 1, "DNA"}, {1, 3, "DNA"}});
    for (ModelScheme scheme : {ModelScheme::Edge, ModelScheme::State,
                               ModelScheme::Hypergraph}) {
      auto got = roundtrip(scheme, s, {"DNA"});
      CHECK(got == s.mentions);
    }
  }
  SUBCASE("two ends under one continuation collapse to the canonical form") {
    Sentence s = make_sentence(4, {{0, 3, "T"}, {1, 2, "T"}, {2, 2, "T"}});
    std::vector<Mention> want = {{0, 3, "T"}, {1, 3, "T"}, {2, 2, "T"}};
    for (ModelScheme scheme : {ModelScheme::Edge, ModelScheme::State,
                               ModelScheme::Hypergraph}) {
      CHECK(roundtrip(scheme, s, {"T"}) == want);
    }
  }
  SUBCASE("cross-type overlap uses separate chains") {
    Sentence s = make_sentence(4, {{1, 3, "PROT"}, {2, 2, "DNA"}});
    for (ModelScheme scheme : {ModelScheme::Edge, ModelScheme::State,
                               ModelScheme::Hypergraph, ModelScheme::LcrfMulti}) {
      auto got = roundtrip(scheme, s, {"DNA", "PROT"});
      CHECK(got == s.mentions);
    }
  }
  SUBCASE("lcrf schemes handle flat annotation") {
    Sentence s = make_sentence(5, {{0, 1, "A"}, {3, 3, "B"}});
    for (ModelScheme scheme : {ModelScheme::LcrfSingle, ModelScheme::LcrfMulti}) {
      auto got = roundtrip(scheme, s, {"A", "B"});
      CHECK(got == s.mentions);
    }
  }
}

TEST_CASE("network: exhaustive round-trip equals nested canonicalization") {
  const int n = 3;
  auto spans = oracles::all_spans(n);
  Sentence base = make_sentence(n, {});
  for (unsigned mask = 0; mask < (1u << spans.size()); ++mask) {
    Sentence s = base;
    for (const auto& sp : oracles::subset_from_mask(spans, mask)) {
      s.add_mention({sp.start, sp.end, "T"});
    }
    auto canon = codec::canonicalize_nested(
        n, oracles::subset_from_mask(spans, mask));
    std::vector<Mention> want;
    for (const auto& sp : canon) want.push_back({sp.start, sp.end, "T"});
    for (ModelScheme scheme : {ModelScheme::Edge, ModelScheme::State,
                               ModelScheme::Hypergraph}) {
      CHECK(roundtrip(scheme, s, {"T"}) == want);
    }
  }
}

TEST_CASE("network: lcrf capacity errors name the offending pair") {
  Sentence nested = make_sentence(4, {{1, 3, "PROT"}, {2, 2, "PROT"}});
  nested.id = "doc1.3";
  Network single = build_network(ModelScheme::LcrfSingle, nested, {"PROT"});
  CHECK_THROWS_WITH_AS(gold_structure(single, nested),
                       doctest::Contains("(1,3,PROT)"), CapacityError);
  CHECK_THROWS_WITH_AS(gold_structure(single, nested),
                       doctest::Contains("doc1.3"), CapacityError);
  Network multi = build_network(ModelScheme::LcrfMulti, nested, {"PROT"});
  CHECK_THROWS_AS(gold_structure(multi, nested), CapacityError);

  // cross-type overlap exceeds single-chain capacity but multi is fine
  Sentence cross = make_sentence(4, {{1, 3, "PROT"}, {2, 2, "DNA"}});
  Network single2 = build_network(ModelScheme::LcrfSingle, cross, {"DNA", "PROT"});
  CHECK_THROWS_AS(gold_structure(single2, cross), CapacityError);
  Network multi2 = build_network(ModelScheme::LcrfMulti, cross, {"DNA", "PROT"});
  CHECK(read_structure(gold_structure(multi2, cross)) == cross.mentions);
}

TEST_CASE("network: unknown mention label is a data error") {
  Sentence s = make_sentence(2, {{0, 0, "MISC"}});
  Network net = build_network(ModelScheme::Edge, s, {"PER"});
  CHECK_THROWS_AS(gold_structure(net, s), DataError);
}

TEST_CASE("network: reduction keeps the outermost mention of a cluster") {
  SUBCASE("single-chain reduction is type-blind") {
    Sentence s = make_sentence(5, {{1, 3, "PROT"}, {2, 2, "DNA"}, {4, 4, "DNA"}});
    int dropped = -1;
    auto kept = reduce_mentions_for_scheme(ModelScheme::LcrfSingle, s, &dropped);
    CHECK(dropped == 1);
    CHECK(kept == std::vector<Mention>{{1, 3, "PROT"}, {4, 4, "DNA"}});
  }
  SUBCASE("per-type reduction only resolves same-type overlap") {
    Sentence s = make_sentence(5, {{1, 3, "PROT"}, {2, 2, "PROT"}, {2, 2, "DNA"}});
    int dropped = -1;
    auto kept = reduce_mentions_for_scheme(ModelScheme::LcrfMulti, s, &dropped);
    CHECK(dropped == 1);
    CHECK(kept == std::vector<Mention>{{1, 3, "PROT"}, {2, 2, "DNA"}});
  }
  SUBCASE("ties prefer the longer mention") {
    Sentence s = make_sentence(4, {{1, 1, "T"}, {1, 3, "T"}});
    auto kept = reduce_mentions_for_scheme(ModelScheme::LcrfSingle, s);
    CHECK(kept == std::vector<Mention>{{1, 3, "T"}});
  }
  SUBCASE("separator and hypergraph schemes keep everything") {
    Sentence s = make_sentence(4, {{1, 3, "T"}, {2, 2, "T"}});
    for (ModelScheme scheme : {ModelScheme::Edge, ModelScheme::State,
                               ModelScheme::Hypergraph}) {
      int dropped = -1;
      CHECK(reduce_mentions_for_scheme(scheme, s, &dropped) == s.mentions);
      CHECK(dropped == 0);
    }
  }
}

TEST_CASE("network: gold structures choose the expected number of edges") {
  Sentence s = make_sentence(3, {{0, 1, "T"}});
  Network net = build_network(ModelScheme::Edge, s, {"T"});
  Structure gold = gold_structure(net, s);
  // one edge per gap on a single chain
  CHECK(gold.chosen_edges().size() == 4);
  std::vector<double> theta(net.num_edges(), 0.25);
  CHECK(gold.score(theta) == doctest::Approx(1.0));
}

TEST_CASE("network: dump names nodes and labels") {
  Sentence s = make_sentence(1, {});
  Network net = build_network(ModelScheme::Edge, s, {"T"});
  attach_penalty(net);
  std::ostringstream out;
  net.dump(out);
  const std::string text = out.str();
  CHECK(text.find("Root -> [O(T,0)] X") != std::string::npos);
  CHECK(text.find("Root -> [I(T,0)] S") != std::string::npos);
  CHECK(text.find("penalty") != std::string::npos);
}

TEST_CASE("network: empty inputs are rejected") {
  Sentence empty;
  empty.id = "e";
  CHECK_THROWS_AS(build_network(ModelScheme::Edge, empty, {"T"}), DataError);
  Sentence s = make_sentence(2, {});
  CHECK_THROWS_AS(build_network(ModelScheme::Edge, s, {}), DataError);
  CHECK_THROWS_AS(build_network(ModelScheme::Edge, s, {"Z", "A"}), DataError);
}
