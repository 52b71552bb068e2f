#include "sepmark/demos.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "sepmark/error.hpp"
#include "sepmark/inference.hpp"

namespace sepmark::demos {

namespace {

const Sentence& demo_sentence() {
  static const Sentence s = [] {
    Sentence out;
    out.id = "restricted-demo";
    out.tokens = {{"an", "-"}, {"Apache", "-"}, {"helicopter", "-"}};
    return out;
  }();
  return s;
}

// Counts the terms the dynamic program sums: product over children, sum
// over edges. On the restricted graph this is the 3x3 combination count.
long long dp_term_count(const Network& net) {
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

}  // namespace

RestrictedHypergraph build_restricted_hypergraph() {
  RestrictedHypergraph out;
  Network& net = out.network;
  net.scheme = ModelScheme::Hypergraph;
  net.n_tokens = 3;
  net.n_types = 1;
  net.sentence = &demo_sentence();
  net.labels = {"T"};

  auto node = [&](NodeKind kind, int pos, int type = -1) {
    net.nodes.push_back({kind, static_cast<std::int16_t>(pos), -1,
                         static_cast<std::int16_t>(type)});
    return static_cast<std::uint32_t>(net.nodes.size() - 1);
  };
  const std::uint32_t a0 = node(NodeKind::HgA, 0);
  const std::uint32_t a1 = node(NodeKind::HgA, 1);
  const std::uint32_t e0 = node(NodeKind::HgE, 0);
  const std::uint32_t e1 = node(NodeKind::HgE, 1);
  const std::uint32_t t0 = node(NodeKind::HgT, 0, 0);
  const std::uint32_t t1 = node(NodeKind::HgT, 1, 0);
  const std::uint32_t i0 = node(NodeKind::HgI, 0, 0);
  const std::uint32_t i1 = node(NodeKind::HgI, 1, 0);
  const std::uint32_t i2 = node(NodeKind::HgI, 2, 0);
  const std::uint32_t x = node(NodeKind::Leaf, 3);
  net.root = a0;
  net.leaf = x;

  auto edge = [&](std::uint32_t parent, std::initializer_list<std::uint32_t> kids,
                  int label) {
    Edge e;
    e.parent = parent;
    e.child_begin = static_cast<std::uint32_t>(net.child_pool.size());
    e.child_count = static_cast<std::uint16_t>(kids.size());
    e.label = static_cast<std::uint8_t>(label);
    e.type = 0;
    for (std::uint32_t c : kids) net.child_pool.push_back(c);
    net.edges.push_back(e);
    return static_cast<std::uint32_t>(net.edges.size() - 1);
  };
  // scaffolding: forced connections from the root down to both branches
  edge(a0, {a1, e0}, kHgScaffold);
  edge(a1, {e1}, kHgScaffold);
  edge(e0, {t0}, kHgScaffold);
  edge(e1, {t1}, kHgScaffold);
  edge(t0, {i0}, kHgTStart);
  // the six optional edges the combination table talks about
  out.named_edges[0] = edge(t1, {i1}, kHgTStart);      // A
  out.named_edges[1] = edge(i0, {i1}, kHgICont);       // B
  out.named_edges[2] = edge(i1, {i2}, kHgICont);       // C
  out.named_edges[3] = edge(i1, {x}, kHgIEnd);         // D
  out.named_edges[4] = edge(i1, {i2, x}, kHgIBoth);    // E
  out.named_edges[5] = edge(i2, {x}, kHgIEnd);         // F

  net.edge_begin.assign(net.nodes.size() + 1, 0);
  for (const Edge& e : net.edges) ++net.edge_begin[e.parent + 1];
  for (std::size_t v = 1; v < net.edge_begin.size(); ++v) {
    net.edge_begin[v] += net.edge_begin[v - 1];
  }
  net.validate();
  return out;
}

SpuriousReport demo_spurious(
    const std::optional<std::array<double, 6>>& weights) {
  RestrictedHypergraph rh = build_restricted_hypergraph();
  const Network& net = rh.network;
  std::vector<double> theta(net.num_edges(), 0.0);
  if (weights.has_value()) {
    for (std::size_t i = 0; i < rh.named_edges.size(); ++i) {
      theta[rh.named_edges[i]] = (*weights)[i];
    }
  }

  SpuriousReport report;
  report.dp_log_z = inside(net, theta).log_z;
  report.true_log_z = brute_force_log_z(net, theta);
  report.spurious_mass = std::exp(report.dp_log_z) - std::exp(report.true_log_z);
  report.dp_combination_terms = dp_term_count(net);

  for_each_structure(net, theta,
                     [&](const std::vector<std::int32_t>& choice, double) {
                       std::string path = "{";
                       for (std::size_t i = 0; i < rh.named_edges.size(); ++i) {
                         const auto e = static_cast<std::int32_t>(rh.named_edges[i]);
                         const std::uint32_t parent = net.edges[rh.named_edges[i]].parent;
                         if (choice[parent] != e) continue;
                         if (path.size() > 1) path += ",";
                         path += static_cast<char>('A' + i);
                       }
                       path += "}";
                       report.valid_hyperpaths.push_back(path);
                     });

  // the combination table: each branch reaching the shared node picks one
  // of C, D, E independently in the dynamic program
  static constexpr char picks[3] = {'C', 'D', 'E'};
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) {
      BranchCombination& combo = report.combinations[static_cast<std::size_t>(3 * row + col)];
      combo.label = static_cast<char>('a' + 3 * row + col);
      combo.upper_pick = picks[row];
      combo.lower_pick = picks[col];
      combo.valid = row == col;
    }
  }
  return report;
}

void render_spurious(const SpuriousReport& report, std::ostream& out) {
  out << "restricted mention hypergraph, 3 words, 1 type\n";
  out << "dp_log_z " << report.dp_log_z << " (Z' = " << std::exp(report.dp_log_z)
      << ")\n";
  out << "true_log_z " << report.true_log_z << " (Z = "
      << std::exp(report.true_log_z) << ")\n";
  out << "spurious_mass " << report.spurious_mass << "\n";
  out << "dp_combination_terms " << report.dp_combination_terms << "\n";
  out << "valid_hyperpaths";
  for (const std::string& p : report.valid_hyperpaths) out << " " << p;
  out << "\n";
  out << "combinations (upper branch pick | lower branch pick):\n";
  for (const BranchCombination& c : report.combinations) {
    out << "  (" << c.label << ") " << c.upper_pick << "|" << c.lower_pick
        << (c.valid ? "  valid path" : "  spurious") << "\n";
  }
}

UniquenessReport demo_uniqueness(int n) {
  if (n < 1 || n > 5) {
    throw CapacityError("uniqueness demo enumerates 2^(n(n+1)/2) span sets; n must be in 1..5");
  }
  UniquenessReport report;
  report.n = n;
  auto spans = [&] {
    std::vector<codec::Span> out;
    for (int s = 0; s < n; ++s) {
      for (int e = s; e < n; ++e) out.push_back({s, e});
    }
    return out;
  }();
  report.span_sets = std::uint64_t{1} << spans.size();
  report.encode_total = true;
  report.all_encodings_valid = true;
  std::set<std::string> image;
  for (std::uint64_t mask = 0; mask < report.span_sets; ++mask) {
    codec::SpanSet subset;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      if (mask & (std::uint64_t{1} << i)) subset.push_back(spans[i]);
    }
    try {
      auto seq = codec::encode(n, subset);
      if (!codec::is_valid(seq)) report.all_encodings_valid = false;
      image.insert(codec::to_string(seq));
    } catch (const std::exception&) {
      report.encode_total = false;
    }
  }
  report.image_size = image.size();
  report.valid_sequences = codec::enumerate_valid_sequences(n).size();
  report.transfer_count = codec::valid_sequence_count(n);
  return report;
}

void render_uniqueness(const UniquenessReport& report, std::ostream& out) {
  out << "separator encoding over " << report.n << " words\n";
  out << "span_sets " << report.span_sets << "\n";
  out << "encoded_image_size " << report.image_size << "\n";
  out << "valid_sequences " << report.valid_sequences << "\n";
  out << "transfer_matrix_count " << report.transfer_count << "\n";
  out << "encode_total " << (report.encode_total ? "yes" : "no") << "\n";
  out << "all_encodings_valid " << (report.all_encodings_valid ? "yes" : "no")
      << "\n";
  if (report.image_size < report.span_sets) {
    out << report.span_sets << " span sets collapse onto " << report.image_size
        << " sequences; distinct sequences decode to distinct span sets\n";
  } else {
    out << "encoding is one-to-one at this length\n";
  }
}

}  // namespace sepmark::demos
