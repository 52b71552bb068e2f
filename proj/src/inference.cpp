#include "sepmark/inference.hpp"

#include <cmath>

#include "sepmark/error.hpp"
#include "sepmark/util.hpp"

namespace sepmark {

namespace {

double edge_total(const Network& net, const std::vector<double>& theta,
                  const std::vector<double>& inside, std::uint32_t e) {
  double s = theta[e];
  for (std::uint32_t c : net.children(net.edges[e])) s += inside[c];
  return s;
}

// Shared state for the explicit enumeration below. Structures are visited
// in lexicographic order of the per-node edge choices, so the first maximum
// found matches the decode tie-break.
struct Enumerator {
  const Network& net;
  const std::vector<double>& theta;
  std::vector<int> include_count;
  std::vector<std::int32_t> choice;
  long long seen = 0;

  LogSumExp total;
  double best_score = kNegInf;
  std::vector<std::int32_t> best_choice;
  bool want_best = false;
  const StructureVisitor* visitor = nullptr;

  Enumerator(const Network& net, const std::vector<double>& theta)
      : net(net),
        theta(theta),
        include_count(net.num_nodes(), 0),
        choice(net.num_nodes(), -1) {
    include_count[net.root] = 1;
  }

  void run(std::uint32_t v, double score) {
    while (v < net.num_nodes() &&
           (include_count[v] == 0 || v == net.leaf)) {
      ++v;
    }
    if (v == net.num_nodes()) {
      if (++seen > kEnumerationBound) {
        throw CapacityError("structure enumeration exceeded " +
                            std::to_string(kEnumerationBound) + " structures");
      }
      total.add(score);
      if (want_best && score > best_score) {
        best_score = score;
        best_choice = choice;
      }
      if (visitor != nullptr) (*visitor)(choice, score);
      return;
    }
    auto [begin, end] = net.out_edges(v);
    for (std::uint32_t e = begin; e < end; ++e) {
      choice[v] = static_cast<std::int32_t>(e);
      for (std::uint32_t c : net.children(net.edges[e])) ++include_count[c];
      run(v + 1, score + theta[e]);
      for (std::uint32_t c : net.children(net.edges[e])) --include_count[c];
    }
    choice[v] = -1;
  }
};

}  // namespace

InsideOutsideTables inside(const Network& network,
                           const std::vector<double>& theta) {
  InsideOutsideTables tables;
  tables.inside.assign(network.num_nodes(), kNegInf);
  tables.inside[network.leaf] = 0.0;
  for (std::uint32_t v = static_cast<std::uint32_t>(network.num_nodes());
       v-- > 0;) {
    if (v == network.leaf) continue;
    auto [begin, end] = network.out_edges(v);
    LogSumExp acc;
    for (std::uint32_t e = begin; e < end; ++e) {
      acc.add(edge_total(network, theta, tables.inside, e));
    }
    tables.inside[v] = acc.value();
  }
  tables.log_z = tables.inside[network.root];
  return tables;
}

EdgeMarginals outside_and_marginals(const Network& network,
                                    const std::vector<double>& theta,
                                    InsideOutsideTables& tables) {
  tables.outside.assign(network.num_nodes(), kNegInf);
  tables.outside[network.root] = 0.0;
  EdgeMarginals marginals;
  marginals.p.assign(network.num_edges(), 0.0);
  for (std::uint32_t v = 0; v < network.num_nodes(); ++v) {
    if (tables.outside[v] == kNegInf) continue;
    auto [begin, end] = network.out_edges(v);
    for (std::uint32_t e = begin; e < end; ++e) {
      const double base = tables.outside[v] + theta[e];
      auto kids = network.children(network.edges[e]);
      double with_inside = base;
      for (std::uint32_t c : kids) with_inside += tables.inside[c];
      if (with_inside != kNegInf) {
        marginals.p[e] = std::exp(with_inside - tables.log_z);
      }
      // the outside score of each child picks up the siblings' inside mass
      for (std::size_t i = 0; i < kids.size(); ++i) {
        double s = base;
        for (std::size_t j = 0; j < kids.size(); ++j) {
          if (j != i) s += tables.inside[kids[j]];
        }
        tables.outside[kids[i]] = log_add(tables.outside[kids[i]], s);
      }
    }
  }
  return marginals;
}

std::vector<double> expected_features(const Network& network,
                                      const EdgeMarginals& marginals,
                                      std::size_t dimension,
                                      const EdgeFeatureFn& features_of) {
  std::vector<double> out(dimension, 0.0);
  for (std::uint32_t e = 0; e < network.num_edges(); ++e) {
    const double p = marginals.p[e];
    if (p == 0.0) continue;
    for (std::uint32_t i : features_of(e)) out[i] += p;
  }
  return out;
}

DecodeResult decode(const Network& network, const std::vector<double>& theta) {
  std::vector<double> best(network.num_nodes(), kNegInf);
  std::vector<std::int32_t> pick(network.num_nodes(), -1);
  best[network.leaf] = 0.0;
  for (std::uint32_t v = static_cast<std::uint32_t>(network.num_nodes());
       v-- > 0;) {
    if (v == network.leaf) continue;
    auto [begin, end] = network.out_edges(v);
    for (std::uint32_t e = begin; e < end; ++e) {
      const double s = edge_total(network, theta, best, e);
      if (s > best[v]) {
        best[v] = s;
        pick[v] = static_cast<std::int32_t>(e);
      }
    }
  }

  DecodeResult result;
  result.structure.network = &network;
  result.structure.choice.assign(network.num_nodes(), -1);
  std::vector<std::uint32_t> stack = {network.root};
  while (!stack.empty()) {
    const std::uint32_t v = stack.back();
    stack.pop_back();
    if (v == network.leaf || result.structure.choice[v] >= 0) continue;
    result.structure.choice[v] = pick[v];
    for (std::uint32_t c :
         network.children(network.edges[static_cast<std::size_t>(pick[v])])) {
      stack.push_back(c);
    }
  }
  result.score = result.structure.score(theta);
  return result;
}

double brute_force_log_z(const Network& network,
                         const std::vector<double>& theta) {
  Enumerator en(network, theta);
  en.run(0, 0.0);
  return en.total.value();
}

DecodeResult brute_force_best(const Network& network,
                              const std::vector<double>& theta) {
  Enumerator en(network, theta);
  en.want_best = true;
  en.run(0, 0.0);
  DecodeResult result;
  result.structure.network = &network;
  result.structure.choice = std::move(en.best_choice);
  result.score = en.best_score;
  return result;
}

void for_each_structure(const Network& network,
                        const std::vector<double>& theta,
                        const StructureVisitor& visit) {
  Enumerator en(network, theta);
  en.visitor = &visit;
  en.run(0, 0.0);
}

}  // namespace sepmark
