#include "semno/louvain.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "semno/rng.hpp"

namespace semno {

WeightedGraph::WeightedGraph(std::size_t node_count, std::span<const Edge> edges,
                             std::span<const double> self_weights)
    : self_(node_count, 0.0), degree_(node_count, 0.0) {
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> arcs;
  arcs.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.a == e.b) {
      self_[e.a] += e.weight;
    } else {
      arcs.emplace_back(e.a, e.b, e.weight);
      arcs.emplace_back(e.b, e.a, e.weight);
    }
  }
  for (std::size_t i = 0; i < self_weights.size() && i < node_count; ++i) {
    self_[i] += self_weights[i];
  }
  std::sort(arcs.begin(), arcs.end());
  offsets_.assign(node_count + 1, 0);
  for (std::size_t i = 0; i < arcs.size();) {
    const auto [a, b, w0] = arcs[i];
    double w = w0;
    std::size_t j = i + 1;
    while (j < arcs.size() && std::get<0>(arcs[j]) == a && std::get<1>(arcs[j]) == b) {
      w += std::get<2>(arcs[j]);
      ++j;
    }
    targets_.push_back(b);
    weights_.push_back(w);
    ++offsets_[a + 1];
    i = j;
  }
  for (std::size_t a = 0; a < node_count; ++a) offsets_[a + 1] += offsets_[a];
  for (std::size_t a = 0; a < node_count; ++a) {
    double k = self_[a];
    for (double w : weights(a)) k += w;
    degree_[a] = k;
    total_ += k;
  }
}

WeightedGraph WeightedGraph::induced(std::span<const std::uint32_t> members) const {
  std::vector<std::int64_t> local(size(), -1);
  for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = static_cast<std::int64_t>(i);
  std::vector<Edge> edges;
  std::vector<double> selfw(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::uint32_t a = members[i];
    selfw[i] = self_[a];
    const auto nb = neighbors(a);
    const auto w = weights(a);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const std::int64_t j = local[nb[k]];
      if (j > static_cast<std::int64_t>(i)) {
        edges.push_back(Edge{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), w[k]});
      }
    }
  }
  return WeightedGraph(members.size(), edges, selfw);
}

WeightedGraph to_weighted(const SemanticGraph& graph) {
  return WeightedGraph(graph.nodes.size(), graph.edges);
}

double modularity(const WeightedGraph& graph, std::span<const std::uint32_t> community) {
  const double two_m = graph.total_weight();
  if (two_m <= 0) return 0.0;
  const std::size_t k = community.empty()
                            ? 0
                            : *std::max_element(community.begin(), community.end()) + std::size_t{1};
  std::vector<double> inside(k, 0.0), tot(k, 0.0);
  for (std::size_t a = 0; a < graph.size(); ++a) {
    const std::uint32_t c = community[a];
    tot[c] += graph.degree(a);
    inside[c] += graph.self_weight(a);
    const auto nb = graph.neighbors(a);
    const auto w = graph.weights(a);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (community[nb[i]] == c) inside[c] += w[i];
    }
  }
  double q = 0;
  for (std::size_t c = 0; c < k; ++c) {
    q += inside[c] / two_m - (tot[c] / two_m) * (tot[c] / two_m);
  }
  return q;
}

std::size_t canonicalize(std::vector<std::uint32_t>& community) {
  if (community.empty()) return 0;
  const std::size_t k = *std::max_element(community.begin(), community.end()) + std::size_t{1};
  std::vector<std::size_t> size(k, 0), first(k, community.size());
  for (std::size_t a = 0; a < community.size(); ++a) {
    ++size[community[a]];
    first[community[a]] = std::min(first[community[a]], a);
  }
  std::vector<std::uint32_t> order;
  for (std::uint32_t c = 0; c < k; ++c) {
    if (size[c] > 0) order.push_back(c);
  }
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    if (size[x] != size[y]) return size[x] > size[y];
    return first[x] < first[y];
  });
  std::vector<std::uint32_t> rename(k, 0);
  for (std::size_t i = 0; i < order.size(); ++i) rename[order[i]] = static_cast<std::uint32_t>(i);
  for (auto& c : community) c = rename[c];
  return order.size();
}

namespace {

// One local-moving phase. Returns true if any node changed community.
bool local_moving(const WeightedGraph& g, std::vector<std::uint32_t>& comm, Rng& rng) {
  const std::size_t n = g.size();
  const double two_m = g.total_weight();
  std::vector<double> tot(n, 0.0);
  std::vector<std::size_t> members(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    tot[comm[a]] += g.degree(a);
    ++members[comm[a]];
  }
  std::vector<std::uint32_t> free_ids;
  for (std::uint32_t c = 0; c < n; ++c) {
    if (members[c] == 0) free_ids.push_back(c);
  }

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[uniform_below(rng, i)]);
  }

  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any_move = false;
  for (std::size_t sweep = 0; sweep < 1000; ++sweep) {
    std::size_t moves = 0;
    for (std::uint32_t a : order) {
      const double k = g.degree(a);
      const std::uint32_t own = comm[a];
      tot[own] -= k;
      --members[own];

      touched.clear();
      const auto nb = g.neighbors(a);
      const auto w = g.weights(a);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        const std::uint32_t c = comm[nb[i]];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += w[i];
      }
      auto score = [&](std::uint32_t c) { return link[c] - tot[c] * k / two_m; };

      std::uint32_t best = own;
      double best_score = score(own);
      const double eps = 1e-12 * std::max(1.0, k);
      for (std::uint32_t c : touched) {
        if (c == own) continue;
        const double s = score(c);
        if (s > best_score + eps || (best != own && s > best_score)) {
          best = c;
          best_score = s;
        }
      }
      // Leaving for an empty community scores 0.
      if (best == own && best_score < -eps && members[own] > 0 && !free_ids.empty()) {
        best = free_ids.back();
        free_ids.pop_back();
      }
      for (std::uint32_t c : touched) link[c] = 0.0;

      if (best != own) {
        ++moves;
        if (members[own] == 0) free_ids.push_back(own);
        if (!free_ids.empty() && free_ids.back() == best) free_ids.pop_back();
      }
      comm[a] = best;
      tot[best] += k;
      ++members[best];
    }
    if (moves == 0) break;
    any_move = true;
  }
  return any_move;
}

WeightedGraph coarsen(const WeightedGraph& g, const std::vector<std::uint32_t>& comm,
                      std::size_t k) {
  std::vector<Edge> edges;
  std::vector<double> selfw(k, 0.0);
  for (std::size_t a = 0; a < g.size(); ++a) {
    selfw[comm[a]] += g.self_weight(a);
    const auto nb = g.neighbors(a);
    const auto w = g.weights(a);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const std::uint32_t ca = comm[a], cb = comm[nb[i]];
      if (ca == cb) {
        selfw[ca] += w[i];  // both directions land here: W'_cc sums ordered pairs
      } else if (a < nb[i]) {
        edges.push_back(Edge{ca, cb, w[i]});
      }
    }
  }
  return WeightedGraph(k, edges, selfw);
}

}  // namespace

namespace {

LouvainResult louvain_once(const WeightedGraph& graph, std::uint64_t seed) {
  LouvainResult result;
  const std::size_t n = graph.size();
  result.community.resize(n);
  std::iota(result.community.begin(), result.community.end(), 0u);
  if (n == 0) return result;
  if (graph.total_weight() <= 0) {
    result.community_count = canonicalize(result.community);
    result.pass_modularity.push_back(0.0);
    return result;
  }

  Rng rng(seed);
  WeightedGraph level = graph;
  result.pass_modularity.push_back(modularity(graph, result.community));
  for (std::size_t round = 0; round < 64; ++round) {
    while (true) {
      std::vector<std::uint32_t> comm(level.size());
      std::iota(comm.begin(), comm.end(), 0u);
      const bool moved = local_moving(level, comm, rng);
      if (!moved) break;
      const std::size_t k = canonicalize(comm);
      for (auto& c : result.community) c = comm[c];
      result.pass_modularity.push_back(modularity(graph, result.community));
      if (k == level.size()) break;
      level = coarsen(level, comm, k);
    }
    // Refinement: single-node moves on the original graph from the converged
    // partition, then aggregate again.
    std::vector<std::uint32_t> refined = result.community;
    canonicalize(refined);
    if (!local_moving(graph, refined, rng)) break;
    const std::size_t k = canonicalize(refined);
    const double q = modularity(graph, refined);
    if (!(q > result.pass_modularity.back())) break;
    result.community = std::move(refined);
    result.pass_modularity.push_back(q);
    level = coarsen(graph, result.community, k);
  }
  result.community_count = canonicalize(result.community);
  result.modularity = modularity(graph, result.community);
  return result;
}

}  // namespace

LouvainResult louvain(const WeightedGraph& graph, std::uint64_t seed, std::size_t restarts) {
  restarts = std::max<std::size_t>(restarts, 1);
  std::vector<LouvainResult> runs(restarts);
  const auto count = static_cast<std::ptrdiff_t>(restarts);
#pragma omp parallel for schedule(dynamic, 1) if (graph.size() >= 2000)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    runs[static_cast<std::size_t>(r)] =
        louvain_once(graph, r == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(r)));
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r) {
    if (runs[r].modularity > runs[best].modularity) best = r;
  }
  return std::move(runs[best]);
}

}  // namespace semno
