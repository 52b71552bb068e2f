#include "sepmark/network.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>

#include "sepmark/error.hpp"

namespace sepmark {

using codec::Separator;

namespace {

constexpr int kNumSchemes = 5;
constexpr std::string_view kSchemeNames[kNumSchemes] = {
    "lcrf-single", "lcrf-multi", "state", "edge", "hypergraph"};

bool separator_allowed(int gap, int n, Separator s) {
  if (gap == 0 && (codec::has_end(s) || codec::has_continue(s))) return false;
  if (gap == n && (codec::has_start(s) || codec::has_continue(s))) return false;
  return true;
}

// BILOU tag ids. lcrf-multi uses the plain BilouTag values within each
// chain; lcrf-single packs the type into the id: 0 is O, then B,I,L,U per
// type as 1+4t .. 4+4t.
int single_tag_id(BilouTag tag, int type) {
  if (tag == kTagO) return 0;
  return 1 + 4 * type + (static_cast<int>(tag) - 1);
}
BilouTag tag_base(ModelScheme scheme, int id) {
  if (id == 0) return kTagO;
  if (scheme == ModelScheme::LcrfMulti) return static_cast<BilouTag>(id);
  return static_cast<BilouTag>(1 + (id - 1) % 4);
}
int tag_type(ModelScheme scheme, int id) {
  if (id == 0 || scheme == ModelScheme::LcrfMulti) return -1;
  return (id - 1) / 4;
}

bool tag_may_start(BilouTag t) { return t == kTagO || t == kTagB || t == kTagU; }
bool tag_may_end(BilouTag t) { return t == kTagO || t == kTagL || t == kTagU; }

bool tag_transition_ok(ModelScheme scheme, int from, int to) {
  const BilouTag a = tag_base(scheme, from);
  const BilouTag b = tag_base(scheme, to);
  const int ta = tag_type(scheme, from);
  const int tb = tag_type(scheme, to);
  switch (a) {
    case kTagO:
    case kTagL:
    case kTagU:
      return tag_may_start(b);
    case kTagB:
    case kTagI:
      return (b == kTagI || b == kTagL) && ta == tb;
  }
  return false;
}

class Builder {
 public:
  Builder(ModelScheme scheme, const Sentence& sentence,
          const std::vector<std::string>& label_set) {
    net_.scheme = scheme;
    net_.n_tokens = sentence.size();
    net_.n_types = static_cast<int>(label_set.size());
    net_.sentence = &sentence;
    net_.labels = label_set;
  }

  std::uint32_t add_node(NodeKind kind, int pos = -1, int sub = -1,
                         int type = -1) {
    net_.nodes.push_back({kind, static_cast<std::int16_t>(pos),
                          static_cast<std::int16_t>(sub),
                          static_cast<std::int16_t>(type)});
    return static_cast<std::uint32_t>(net_.nodes.size() - 1);
  }

  void add_edge(std::uint32_t parent, std::initializer_list<std::uint32_t> kids,
                int label, int type) {
    add_edge(parent, std::vector<std::uint32_t>(kids), label, type);
  }

  void add_edge(std::uint32_t parent, const std::vector<std::uint32_t>& kids,
                int label, int type) {
    Edge e;
    e.parent = parent;
    e.child_begin = static_cast<std::uint32_t>(net_.child_pool.size());
    e.child_count = static_cast<std::uint16_t>(kids.size());
    e.label = static_cast<std::uint8_t>(label);
    e.type = static_cast<std::int16_t>(type);
    for (std::uint32_t c : kids) net_.child_pool.push_back(c);
    net_.edges.push_back(e);
  }

  Network finish(std::uint32_t root, std::uint32_t leaf) {
    net_.root = root;
    net_.leaf = leaf;
    std::stable_sort(net_.edges.begin(), net_.edges.end(),
                     [](const Edge& a, const Edge& b) { return a.parent < b.parent; });
    net_.edge_begin.assign(net_.nodes.size() + 1, 0);
    for (const Edge& e : net_.edges) ++net_.edge_begin[e.parent + 1];
    for (std::size_t v = 1; v < net_.edge_begin.size(); ++v) {
      net_.edge_begin[v] += net_.edge_begin[v - 1];
    }
    return std::move(net_);
  }

 private:
  Network net_;
};

// Adds per-type entry nodes tied to the root by one junction hyperedge, so
// that a structure contains every chain and the partition function is the
// product over types. With one type the root connects to the chain directly.
std::vector<std::uint32_t> add_chain_entries(Builder& b, std::uint32_t root,
                                             int n_types) {
  std::vector<std::uint32_t> entries;
  if (n_types <= 1) {
    entries.push_back(root);
    return entries;
  }
  for (int t = 0; t < n_types; ++t) {
    entries.push_back(b.add_node(NodeKind::ChainStart, -1, -1, t));
  }
  b.add_edge(root, entries, 0, -1);
  return entries;
}

Network build_edge_scheme(const Sentence& sentence,
                          const std::vector<std::string>& label_set) {
  Builder b(ModelScheme::Edge, sentence, label_set);
  const int n = sentence.size();
  const int T = static_cast<int>(label_set.size());
  const std::uint32_t root = b.add_node(NodeKind::Root);
  const auto entries = add_chain_entries(b, root, T);
  // word k of chain t: out node at node_at(k,t,0), in node at node_at(k,t,1)
  std::vector<std::uint32_t> word0(static_cast<std::size_t>(2 * n * T));
  auto node_at = [&](int k, int t, int in) -> std::uint32_t& {
    return word0[static_cast<std::size_t>(2 * (k * T + t) + in)];
  };
  for (int k = 0; k < n; ++k) {
    for (int t = 0; t < T; ++t) {
      node_at(k, t, 0) = b.add_node(NodeKind::Out, k, -1, t);
      node_at(k, t, 1) = b.add_node(NodeKind::In, k, -1, t);
    }
  }
  const std::uint32_t leaf = b.add_node(NodeKind::Leaf, n);

  for (int t = 0; t < T; ++t) {
    b.add_edge(entries[static_cast<std::size_t>(t)], {node_at(0, t, 0)},
               static_cast<int>(Separator::X), t);
    b.add_edge(entries[static_cast<std::size_t>(t)], {node_at(0, t, 1)},
               static_cast<int>(Separator::S), t);
  }
  for (int k = 0; k < n; ++k) {
    for (int t = 0; t < T; ++t) {
      if (k + 1 < n) {
        b.add_edge(node_at(k, t, 0), {node_at(k + 1, t, 0)},
                   static_cast<int>(Separator::X), t);
        b.add_edge(node_at(k, t, 0), {node_at(k + 1, t, 1)},
                   static_cast<int>(Separator::S), t);
        b.add_edge(node_at(k, t, 1), {node_at(k + 1, t, 0)},
                   static_cast<int>(Separator::E), t);
        for (Separator s : {Separator::ES, Separator::C, Separator::CS,
                            Separator::EC, Separator::ECS}) {
          b.add_edge(node_at(k, t, 1), {node_at(k + 1, t, 1)},
                     static_cast<int>(s), t);
        }
      } else {
        b.add_edge(node_at(k, t, 0), {leaf}, static_cast<int>(Separator::X), t);
        b.add_edge(node_at(k, t, 1), {leaf}, static_cast<int>(Separator::E), t);
      }
    }
  }
  return b.finish(root, leaf);
}

Network build_state_scheme(const Sentence& sentence,
                           const std::vector<std::string>& label_set) {
  Builder b(ModelScheme::State, sentence, label_set);
  const int n = sentence.size();
  const int T = static_cast<int>(label_set.size());
  const std::uint32_t root = b.add_node(NodeKind::Root);
  const auto entries = add_chain_entries(b, root, T);
  // state_of[g][t][s]: node id or UINT32_MAX when the separator is not
  // allowed at that gap.
  const std::uint32_t kNone = UINT32_MAX;
  std::vector<std::uint32_t> states(
      static_cast<std::size_t>((n + 1) * T * codec::kNumSeparators), kNone);
  auto state_of = [&](int g, int t, int s) -> std::uint32_t& {
    return states[static_cast<std::size_t>((g * T + t) * codec::kNumSeparators + s)];
  };
  for (int g = 0; g <= n; ++g) {
    for (int t = 0; t < T; ++t) {
      for (int s = 0; s < codec::kNumSeparators; ++s) {
        if (!separator_allowed(g, n, static_cast<Separator>(s))) continue;
        state_of(g, t, s) = b.add_node(NodeKind::SepState, g, s, t);
      }
    }
  }
  const std::uint32_t leaf = b.add_node(NodeKind::Leaf, n);

  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < codec::kNumSeparators; ++s) {
      if (state_of(0, t, s) == kNone) continue;
      b.add_edge(entries[static_cast<std::size_t>(t)], {state_of(0, t, s)}, s, t);
    }
  }
  for (int g = 0; g <= n; ++g) {
    for (int t = 0; t < T; ++t) {
      for (int s = 0; s < codec::kNumSeparators; ++s) {
        const std::uint32_t v = state_of(g, t, s);
        if (v == kNone) continue;
        if (g == n) {
          b.add_edge(v, {leaf}, 0, t);
          continue;
        }
        for (int s2 = 0; s2 < codec::kNumSeparators; ++s2) {
          const std::uint32_t w = state_of(g + 1, t, s2);
          if (w == kNone) continue;
          if (codec::next_in(static_cast<Separator>(s)) !=
              codec::prev_in(static_cast<Separator>(s2))) {
            continue;
          }
          b.add_edge(v, {w}, s2, t);
        }
      }
    }
  }
  return b.finish(root, leaf);
}

Network build_lcrf(ModelScheme scheme, const Sentence& sentence,
                   const std::vector<std::string>& label_set) {
  Builder b(scheme, sentence, label_set);
  const int n = sentence.size();
  const int T = static_cast<int>(label_set.size());
  const bool multi = scheme == ModelScheme::LcrfMulti;
  const int chains = multi ? T : 1;
  const int tags = multi ? 5 : 1 + 4 * T;

  const std::uint32_t root = b.add_node(NodeKind::Root);
  const auto entries = add_chain_entries(b, root, chains);
  const std::uint32_t kNone = UINT32_MAX;
  std::vector<std::uint32_t> states(
      static_cast<std::size_t>(n * chains * tags), kNone);
  auto state_of = [&](int k, int c, int id) -> std::uint32_t& {
    return states[static_cast<std::size_t>((k * chains + c) * tags + id)];
  };
  for (int k = 0; k < n; ++k) {
    for (int c = 0; c < chains; ++c) {
      for (int id = 0; id < tags; ++id) {
        // I and L tags cannot occur at the first word; leave them out so
        // every node stays reachable from the root.
        if (k == 0 && !tag_may_start(tag_base(scheme, id))) continue;
        states[static_cast<std::size_t>((k * chains + c) * tags + id)] =
            b.add_node(NodeKind::BilouState, k, id, multi ? c : -1);
      }
    }
  }
  const std::uint32_t leaf = b.add_node(NodeKind::Leaf, n);

  for (int c = 0; c < chains; ++c) {
    for (int id = 0; id < tags; ++id) {
      const std::uint32_t v = state_of(0, c, id);
      if (v == kNone) continue;
      b.add_edge(entries[static_cast<std::size_t>(c)], {v}, id,
                 multi ? c : -1);
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int c = 0; c < chains; ++c) {
      for (int id = 0; id < tags; ++id) {
        const std::uint32_t v = state_of(k, c, id);
        if (v == kNone) continue;
        if (k + 1 < n) {
          for (int id2 = 0; id2 < tags; ++id2) {
            const std::uint32_t w = state_of(k + 1, c, id2);
            if (w == kNone) continue;
            if (!tag_transition_ok(scheme, id, id2)) continue;
            b.add_edge(v, {w}, id2, multi ? c : -1);
          }
        } else if (tag_may_end(tag_base(scheme, id))) {
          b.add_edge(v, {leaf}, 0, multi ? c : -1);
        }
        // B and I at the last word are dead ends: they stay in the network
        // (their incoming edges exist) but reach no structure.
      }
    }
  }
  return b.finish(root, leaf);
}

Network build_hypergraph(const Sentence& sentence,
                         const std::vector<std::string>& label_set) {
  Builder b(ModelScheme::Hypergraph, sentence, label_set);
  const int n = sentence.size();
  const int T = static_cast<int>(label_set.size());
  std::vector<std::uint32_t> a(static_cast<std::size_t>(n));
  std::vector<std::uint32_t> e(static_cast<std::size_t>(n));
  std::vector<std::uint32_t> tn(static_cast<std::size_t>(n * T));
  std::vector<std::uint32_t> in(static_cast<std::size_t>(n * T));
  auto t_of = [&](int k, int t) -> std::uint32_t& {
    return tn[static_cast<std::size_t>(k * T + t)];
  };
  auto i_of = [&](int k, int t) -> std::uint32_t& {
    return in[static_cast<std::size_t>(k * T + t)];
  };
  for (int k = 0; k < n; ++k) {
    a[static_cast<std::size_t>(k)] = b.add_node(NodeKind::HgA, k);
    e[static_cast<std::size_t>(k)] = b.add_node(NodeKind::HgE, k);
    for (int t = 0; t < T; ++t) t_of(k, t) = b.add_node(NodeKind::HgT, k, -1, t);
    for (int t = 0; t < T; ++t) i_of(k, t) = b.add_node(NodeKind::HgI, k, -1, t);
  }
  const std::uint32_t leaf = b.add_node(NodeKind::Leaf, n);

  for (int k = 0; k < n; ++k) {
    if (k + 1 < n) {
      b.add_edge(a[static_cast<std::size_t>(k)],
                 {a[static_cast<std::size_t>(k) + 1], e[static_cast<std::size_t>(k)]},
                 kHgScaffold, -1);
    } else {
      b.add_edge(a[static_cast<std::size_t>(k)], {e[static_cast<std::size_t>(k)]},
                 kHgScaffold, -1);
    }
    std::vector<std::uint32_t> kids;
    for (int t = 0; t < T; ++t) kids.push_back(t_of(k, t));
    b.add_edge(e[static_cast<std::size_t>(k)], kids, kHgScaffold, -1);
    for (int t = 0; t < T; ++t) {
      b.add_edge(t_of(k, t), {leaf}, kHgTSkip, t);
      b.add_edge(t_of(k, t), {i_of(k, t)}, kHgTStart, t);
    }
    for (int t = 0; t < T; ++t) {
      b.add_edge(i_of(k, t), {leaf}, kHgIEnd, t);
      if (k + 1 < n) {
        b.add_edge(i_of(k, t), {i_of(k + 1, t)}, kHgICont, t);
        b.add_edge(i_of(k, t), {i_of(k + 1, t), leaf}, kHgIBoth, t);
      }
    }
  }
  return b.finish(a[0], leaf);
}

// Lookup helper for gold construction and structure reading.
struct NodeIndex {
  explicit NodeIndex(const Network& net) : net(net) {}
  std::uint32_t find(NodeKind kind, int pos, int type, int sub = -1) const {
    for (std::uint32_t v = 0; v < net.num_nodes(); ++v) {
      const Node& node = net.nodes[v];
      if (node.kind == kind && node.pos == pos && node.type == type &&
          (sub < 0 || node.sub == sub)) {
        return v;
      }
    }
    throw std::logic_error("node not found in network");
  }
  const Network& net;
};

std::uint32_t find_edge_by_label(const Network& net, std::uint32_t parent,
                                 int label) {
  auto [begin, end] = net.out_edges(parent);
  for (std::uint32_t e = begin; e < end; ++e) {
    if (net.edges[e].label == label) return e;
  }
  throw std::logic_error("edge with requested label not found");
}

std::vector<std::uint32_t> chain_entry_nodes(const Network& net, int chains) {
  std::vector<std::uint32_t> entries;
  if (chains <= 1) {
    entries.push_back(net.root);
    return entries;
  }
  auto [begin, end] = net.out_edges(net.root);
  if (end != begin + 1) throw std::logic_error("expected a single junction edge");
  for (std::uint32_t c : net.children(net.edges[begin])) entries.push_back(c);
  return entries;
}

std::vector<codec::SpanSet> spans_by_type(const Network& net,
                                          const Sentence& sentence) {
  std::vector<codec::SpanSet> by_type(static_cast<std::size_t>(net.n_types));
  for (const Mention& m : sentence.mentions) {
    auto it = std::lower_bound(net.labels.begin(), net.labels.end(), m.label);
    if (it == net.labels.end() || *it != m.label) {
      throw DataError("mention label '" + m.label +
                      "' is not in the network label set");
    }
    by_type[static_cast<std::size_t>(it - net.labels.begin())].push_back(
        {m.start, m.end});
  }
  return by_type;
}

void check_no_overlap(const Sentence& sentence, bool same_type_only,
                      std::string_view scheme_name) {
  for (std::size_t i = 0; i < sentence.mentions.size(); ++i) {
    for (std::size_t j = i + 1; j < sentence.mentions.size(); ++j) {
      const Mention& a = sentence.mentions[i];
      const Mention& b = sentence.mentions[j];
      if (same_type_only && a.label != b.label) continue;
      if (!mentions_overlap(a, b)) continue;
      throw CapacityError(
          std::string(scheme_name) + " cannot represent overlapping mentions (" +
          std::to_string(a.start) + "," + std::to_string(a.end) + "," + a.label +
          ") and (" + std::to_string(b.start) + "," + std::to_string(b.end) +
          "," + b.label + ") in sentence " + sentence.id);
    }
  }
}

void assign_bilou(std::vector<int>& tag, const Mention& m, int type,
                  ModelScheme scheme) {
  auto id = [&](BilouTag t) {
    return scheme == ModelScheme::LcrfMulti ? static_cast<int>(t)
                                            : single_tag_id(t, type);
  };
  if (m.start == m.end) {
    tag[static_cast<std::size_t>(m.start)] = id(kTagU);
    return;
  }
  tag[static_cast<std::size_t>(m.start)] = id(kTagB);
  for (int k = m.start + 1; k < m.end; ++k) {
    tag[static_cast<std::size_t>(k)] = id(kTagI);
  }
  tag[static_cast<std::size_t>(m.end)] = id(kTagL);
}

}  // namespace

std::string_view to_string(ModelScheme scheme) {
  return kSchemeNames[static_cast<int>(scheme)];
}

std::optional<ModelScheme> scheme_from_string(std::string_view text) {
  for (int i = 0; i < kNumSchemes; ++i) {
    if (kSchemeNames[i] == text) return static_cast<ModelScheme>(i);
  }
  return std::nullopt;
}

std::string Network::node_name(std::uint32_t v) const {
  const Node& node = nodes[v];
  auto pos = std::to_string(node.pos);
  auto chain = node.type >= 0 ? labels[static_cast<std::size_t>(node.type)]
                              : std::string("*");
  switch (node.kind) {
    case NodeKind::Root: return "Root";
    case NodeKind::Leaf: return "Leaf";
    case NodeKind::ChainStart: return "Entry(" + chain + ")";
    case NodeKind::Out: return "O(" + chain + "," + pos + ")";
    case NodeKind::In: return "I(" + chain + "," + pos + ")";
    case NodeKind::SepState:
      return "Sep(" + chain + "," + pos + "," +
             std::string(codec::name(static_cast<Separator>(node.sub))) + ")";
    case NodeKind::BilouState: {
      static constexpr std::string_view base[5] = {"O", "B", "I", "L", "U"};
      std::string tag{base[static_cast<int>(tag_base(scheme, node.sub))]};
      int t = tag_type(scheme, node.sub);
      if (t >= 0) tag += "-" + labels[static_cast<std::size_t>(t)];
      if (scheme == ModelScheme::LcrfMulti && node.type >= 0 && node.sub != kTagO) {
        tag += "-" + chain;
      }
      return "Tag(" + pos + "," + tag + ")";
    }
    case NodeKind::HgA: return "A(" + pos + ")";
    case NodeKind::HgE: return "E(" + pos + ")";
    case NodeKind::HgT: return "T(" + chain + "," + pos + ")";
    case NodeKind::HgI: return "M(" + chain + "," + pos + ")";
  }
  return "?";
}

std::string Network::edge_label_name(const Edge& e) const {
  const Node& child = nodes[child_pool[e.child_begin]];
  if (child.kind == NodeKind::ChainStart) return "join";
  switch (scheme) {
    case ModelScheme::Edge:
      return std::string(codec::name(static_cast<Separator>(e.label)));
    case ModelScheme::State:
      return nodes[e.parent].kind == NodeKind::SepState && child.kind == NodeKind::Leaf
                 ? "stop"
                 : std::string(codec::name(static_cast<Separator>(e.label)));
    case ModelScheme::LcrfSingle:
    case ModelScheme::LcrfMulti: {
      if (child.kind == NodeKind::Leaf) return "stop";
      static constexpr std::string_view base[5] = {"O", "B", "I", "L", "U"};
      return std::string(base[static_cast<int>(tag_base(scheme, e.label))]);
    }
    case ModelScheme::Hypergraph: {
      static constexpr std::string_view names[6] = {"scaffold", "T>X", "T>I",
                                                    "I>X", "I>I", "I>IX"};
      return std::string(names[e.label]);
    }
  }
  return "?";
}

void Network::dump(std::ostream& out) const {
  out << to_string(scheme) << " network, " << n_tokens << " words, "
      << n_types << " types, " << num_nodes() << " nodes, " << num_edges()
      << " edges\n";
  for (std::uint32_t v = 0; v < num_nodes(); ++v) {
    auto [begin, end] = out_edges(v);
    for (std::uint32_t e = begin; e < end; ++e) {
      out << "  " << node_name(v) << " -> [";
      bool first = true;
      for (std::uint32_t c : children(edges[e])) {
        if (!first) out << ", ";
        out << node_name(c);
        first = false;
      }
      out << "] " << edge_label_name(edges[e]);
      if (edges[e].type >= 0) {
        out << " type=" << labels[static_cast<std::size_t>(edges[e].type)];
      }
      if (edges[e].penalty) out << " penalty";
      out << "\n";
    }
  }
}

void Network::validate() const {
  if (nodes.empty()) throw std::logic_error("empty network");
  if (nodes[root].kind != NodeKind::Root && scheme != ModelScheme::Hypergraph) {
    throw std::logic_error("root node has wrong kind");
  }
  if (nodes[leaf].kind != NodeKind::Leaf) {
    throw std::logic_error("leaf node has wrong kind");
  }
  if (edge_begin.size() != nodes.size() + 1) {
    throw std::logic_error("edge index out of sync");
  }
  for (std::uint32_t e = 0; e < num_edges(); ++e) {
    const Edge& edge = edges[e];
    if (edge.child_count == 0) throw std::logic_error("edge without children");
    for (std::uint32_t c : children(edge)) {
      if (c <= edge.parent || c >= num_nodes()) {
        throw std::logic_error("edge violates topological order");
      }
    }
    if (e < edge_begin[edge.parent] || e >= edge_begin[edge.parent + 1]) {
      throw std::logic_error("edge grouping out of sync");
    }
  }
  std::vector<bool> from_root(num_nodes(), false);
  from_root[root] = true;
  for (std::uint32_t v = 0; v < num_nodes(); ++v) {
    if (!from_root[v]) continue;
    auto [begin, end] = out_edges(v);
    for (std::uint32_t e = begin; e < end; ++e) {
      for (std::uint32_t c : children(edges[e])) from_root[c] = true;
    }
  }
  std::vector<bool> to_leaf(num_nodes(), false);
  to_leaf[leaf] = true;
  for (std::uint32_t v = static_cast<std::uint32_t>(num_nodes()); v-- > 0;) {
    auto [begin, end] = out_edges(v);
    for (std::uint32_t e = begin; e < end; ++e) {
      bool all = true;
      for (std::uint32_t c : children(edges[e])) all = all && to_leaf[c];
      if (all) to_leaf[v] = true;
    }
  }
  for (std::uint32_t v = 0; v < num_nodes(); ++v) {
    if (!from_root[v]) throw std::logic_error("node unreachable from root");
    if (!to_leaf[v] && nodes[v].kind != NodeKind::BilouState) {
      // B/I tags at the last word cannot reach the leaf; everything else must.
      throw std::logic_error("leaf unreachable from node");
    }
  }
}

std::vector<std::uint32_t> Structure::chosen_edges() const {
  std::vector<std::uint32_t> out;
  for (std::size_t v = 0; v < choice.size(); ++v) {
    if (choice[v] >= 0) out.push_back(static_cast<std::uint32_t>(choice[v]));
  }
  return out;
}

double Structure::score(const std::vector<double>& theta) const {
  double total = 0.0;
  for (std::size_t v = 0; v < choice.size(); ++v) {
    if (choice[v] >= 0) total += theta[static_cast<std::size_t>(choice[v])];
  }
  return total;
}

bool is_valid_structure(const Structure& s) {
  const Network& net = *s.network;
  if (s.choice.size() != net.num_nodes()) return false;
  std::vector<bool> included(net.num_nodes(), false);
  included[net.root] = true;
  for (std::uint32_t v = 0; v < net.num_nodes(); ++v) {
    if (!included[v]) {
      if (s.choice[v] >= 0) return false;  // an orphan choice
      continue;
    }
    if (v == net.leaf) continue;
    const std::int32_t e = s.choice[v];
    if (e < 0) return false;  // included node without a chosen edge
    const Edge& edge = net.edges[static_cast<std::size_t>(e)];
    if (edge.parent != v) return false;
    for (std::uint32_t c : net.children(edge)) included[c] = true;
  }
  return s.choice[net.leaf] < 0;
}

Network build_network(ModelScheme scheme, const Sentence& sentence,
                      const std::vector<std::string>& label_set) {
  if (sentence.size() == 0) throw DataError("cannot build a network for an empty sentence");
  if (label_set.empty()) throw DataError("cannot build a network without labels");
  if (!std::is_sorted(label_set.begin(), label_set.end())) {
    throw DataError("label set must be sorted");
  }
  switch (scheme) {
    case ModelScheme::Edge: return build_edge_scheme(sentence, label_set);
    case ModelScheme::State: return build_state_scheme(sentence, label_set);
    case ModelScheme::LcrfSingle:
    case ModelScheme::LcrfMulti: return build_lcrf(scheme, sentence, label_set);
    case ModelScheme::Hypergraph: return build_hypergraph(sentence, label_set);
  }
  throw std::logic_error("unknown scheme");
}

Network& attach_penalty(Network& network) {
  for (Edge& e : network.edges) {
    const Node& child = network.nodes[network.child_pool[e.child_begin]];
    switch (network.scheme) {
      case ModelScheme::Edge:
        e.penalty = e.child_count == 1 && child.kind == NodeKind::In;
        break;
      case ModelScheme::State:
        e.penalty = child.kind == NodeKind::SepState &&
                    codec::has_start(static_cast<Separator>(child.sub));
        break;
      case ModelScheme::LcrfSingle:
      case ModelScheme::LcrfMulti: {
        if (child.kind != NodeKind::BilouState) break;
        const BilouTag t = tag_base(network.scheme, child.sub);
        e.penalty = t == kTagB || t == kTagU;
        break;
      }
      case ModelScheme::Hypergraph:
        e.penalty = e.label == kHgTStart;
        break;
    }
  }
  return network;
}

Structure gold_structure(const Network& network, const Sentence& sentence) {
  if (network.sentence != &sentence &&
      network.n_tokens != sentence.size()) {
    throw DataError("network was built for a different sentence");
  }
  Structure st;
  st.network = &network;
  st.choice.assign(network.num_nodes(), -1);
  const int n = network.n_tokens;

  auto choose = [&](std::uint32_t parent, std::uint32_t e) {
    st.choice[parent] = static_cast<std::int32_t>(e);
  };

  switch (network.scheme) {
    case ModelScheme::Edge: {
      auto by_type = spans_by_type(network, sentence);
      auto entries = chain_entry_nodes(network, network.n_types);
      if (network.n_types > 1) choose(network.root, network.out_edges(network.root).first);
      for (int t = 0; t < network.n_types; ++t) {
        auto seq = codec::encode(n, by_type[static_cast<std::size_t>(t)]);
        std::uint32_t cur = entries[static_cast<std::size_t>(t)];
        for (int g = 0; g <= n; ++g) {
          std::uint32_t e = find_edge_by_label(
              network, cur, static_cast<int>(seq.gaps[static_cast<std::size_t>(g)]));
          choose(cur, e);
          cur = network.child_pool[network.edges[e].child_begin];
        }
      }
      break;
    }
    case ModelScheme::State: {
      auto by_type = spans_by_type(network, sentence);
      auto entries = chain_entry_nodes(network, network.n_types);
      if (network.n_types > 1) choose(network.root, network.out_edges(network.root).first);
      for (int t = 0; t < network.n_types; ++t) {
        auto seq = codec::encode(n, by_type[static_cast<std::size_t>(t)]);
        std::uint32_t cur = entries[static_cast<std::size_t>(t)];
        for (int g = 0; g <= n; ++g) {
          std::uint32_t e = find_edge_by_label(
              network, cur, static_cast<int>(seq.gaps[static_cast<std::size_t>(g)]));
          choose(cur, e);
          cur = network.child_pool[network.edges[e].child_begin];
        }
        // the final state steps to the leaf through its only edge
        choose(cur, network.out_edges(cur).first);
      }
      break;
    }
    case ModelScheme::LcrfSingle:
    case ModelScheme::LcrfMulti: {
      const bool multi = network.scheme == ModelScheme::LcrfMulti;
      check_no_overlap(sentence, multi, to_string(network.scheme));
      const int chains = multi ? network.n_types : 1;
      auto entries = chain_entry_nodes(network, chains);
      if (chains > 1) choose(network.root, network.out_edges(network.root).first);
      for (int c = 0; c < chains; ++c) {
        std::vector<int> tag(static_cast<std::size_t>(n), kTagO);
        for (const Mention& m : sentence.mentions) {
          const int type = network.n_types == 0 ? -1 : [&] {
            auto it = std::lower_bound(network.labels.begin(),
                                       network.labels.end(), m.label);
            if (it == network.labels.end() || *it != m.label) {
              throw DataError("mention label '" + m.label +
                              "' is not in the network label set");
            }
            return static_cast<int>(it - network.labels.begin());
          }();
          if (multi && type != c) continue;
          assign_bilou(tag, m, type, network.scheme);
        }
        std::uint32_t cur = entries[static_cast<std::size_t>(c)];
        for (int k = 0; k < n; ++k) {
          std::uint32_t e =
              find_edge_by_label(network, cur, tag[static_cast<std::size_t>(k)]);
          choose(cur, e);
          cur = network.child_pool[network.edges[e].child_begin];
        }
        choose(cur, find_edge_by_label(network, cur, 0));
      }
      break;
    }
    case ModelScheme::Hypergraph: {
      auto by_type = spans_by_type(network, sentence);
      NodeIndex index(network);
      for (int k = 0; k < n; ++k) {
        std::uint32_t a = index.find(NodeKind::HgA, k, -1);
        choose(a, network.out_edges(a).first);
        std::uint32_t e = index.find(NodeKind::HgE, k, -1);
        choose(e, network.out_edges(e).first);
      }
      for (int t = 0; t < network.n_types; ++t) {
        auto seq = codec::encode(n, by_type[static_cast<std::size_t>(t)]);
        auto profile = codec::in_mention_profile(seq);
        for (int k = 0; k < n; ++k) {
          std::uint32_t tn = index.find(NodeKind::HgT, k, t);
          const bool starts = codec::has_start(seq.gaps[static_cast<std::size_t>(k)]);
          choose(tn, find_edge_by_label(network, tn, starts ? kHgTStart : kHgTSkip));
          if (!profile[static_cast<std::size_t>(k)]) continue;
          const Separator after = seq.gaps[static_cast<std::size_t>(k) + 1];
          int kind = kHgIEnd;
          if (codec::has_continue(after)) {
            kind = codec::has_end(after) ? kHgIBoth : kHgICont;
          }
          std::uint32_t iv = index.find(NodeKind::HgI, k, t);
          choose(iv, find_edge_by_label(network, iv, kind));
        }
      }
      break;
    }
  }
  return st;
}

std::vector<Mention> read_structure(const Structure& structure) {
  const Network& net = *structure.network;
  const int n = net.n_tokens;
  std::vector<Mention> out;

  auto add_spans = [&](const codec::SpanSet& spans, int type) {
    for (const auto& sp : spans) {
      out.push_back({sp.start, sp.end, net.labels[static_cast<std::size_t>(type)]});
    }
  };

  switch (net.scheme) {
    case ModelScheme::Edge:
    case ModelScheme::State: {
      auto entries = chain_entry_nodes(net, net.n_types);
      for (int t = 0; t < net.n_types; ++t) {
        codec::SeparatorSequence seq;
        std::uint32_t cur = entries[static_cast<std::size_t>(t)];
        for (int g = 0; g <= n; ++g) {
          const Edge& e = net.edges[static_cast<std::size_t>(structure.choice[cur])];
          seq.gaps.push_back(static_cast<Separator>(e.label));
          cur = net.child_pool[e.child_begin];
        }
        add_spans(codec::interpret(seq), t);
      }
      break;
    }
    case ModelScheme::LcrfSingle:
    case ModelScheme::LcrfMulti: {
      const bool multi = net.scheme == ModelScheme::LcrfMulti;
      const int chains = multi ? net.n_types : 1;
      auto entries = chain_entry_nodes(net, chains);
      for (int c = 0; c < chains; ++c) {
        std::uint32_t cur = entries[static_cast<std::size_t>(c)];
        int open_start = -1;
        int open_type = -1;
        for (int k = 0; k < n; ++k) {
          const Edge& e = net.edges[static_cast<std::size_t>(structure.choice[cur])];
          cur = net.child_pool[e.child_begin];
          const Node& node = net.nodes[cur];
          const BilouTag tag = tag_base(net.scheme, node.sub);
          const int type = multi ? c : tag_type(net.scheme, node.sub);
          switch (tag) {
            case kTagO: break;
            case kTagU: out.push_back({k, k, net.labels[static_cast<std::size_t>(type)]}); break;
            case kTagB: open_start = k; open_type = type; break;
            case kTagI: break;
            case kTagL:
              if (open_start < 0) throw std::logic_error("L tag without open run");
              out.push_back({open_start, k,
                             net.labels[static_cast<std::size_t>(open_type)]});
              open_start = -1;
              break;
          }
        }
      }
      break;
    }
    case ModelScheme::Hypergraph: {
      NodeIndex index(net);
      for (int t = 0; t < net.n_types; ++t) {
        codec::SeparatorSequence seq;
        seq.gaps.assign(static_cast<std::size_t>(n) + 1, Separator::X);
        for (int k = 0; k < n; ++k) {
          std::uint32_t tn = index.find(NodeKind::HgT, k, t);
          bool starts = net.edges[static_cast<std::size_t>(structure.choice[tn])].label ==
                        kHgTStart;
          std::uint32_t iv = index.find(NodeKind::HgI, k, t);
          bool ends = false, cont = false;
          if (structure.choice[iv] >= 0) {
            switch (net.edges[static_cast<std::size_t>(structure.choice[iv])].label) {
              case kHgIEnd: ends = true; break;
              case kHgICont: cont = true; break;
              case kHgIBoth: ends = cont = true; break;
              default: throw std::logic_error("unexpected edge out of an I node");
            }
          }
          auto& gap = seq.gaps[static_cast<std::size_t>(k)];
          gap = codec::separator_from_flags(starts, codec::has_end(gap),
                                            codec::has_continue(gap));
          seq.gaps[static_cast<std::size_t>(k) + 1] =
              codec::separator_from_flags(false, ends, cont);
        }
        add_spans(codec::interpret(seq), t);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Mention> reduce_mentions_for_scheme(ModelScheme scheme,
                                                const Sentence& sentence,
                                                int* dropped) {
  if (dropped != nullptr) *dropped = 0;
  if (scheme != ModelScheme::LcrfSingle && scheme != ModelScheme::LcrfMulti) {
    return sentence.mentions;
  }
  const bool same_type_only = scheme == ModelScheme::LcrfMulti;
  // Earliest start first, longest span first on ties: the outermost mention
  // of each overlapping cluster survives.
  std::vector<Mention> order = sentence.mentions;
  std::sort(order.begin(), order.end(), [](const Mention& a, const Mention& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end > b.end;
    return a.label < b.label;
  });
  std::vector<Mention> kept;
  for (const Mention& m : order) {
    bool blocked = false;
    for (const Mention& k : kept) {
      if (same_type_only && k.label != m.label) continue;
      if (mentions_overlap(k, m)) {
        blocked = true;
        break;
      }
    }
    if (blocked) {
      if (dropped != nullptr) ++*dropped;
    } else {
      kept.push_back(m);
    }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace sepmark
