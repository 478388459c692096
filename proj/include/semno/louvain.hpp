#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "semno/graph.hpp"

namespace semno {

/// Symmetric weighted adjacency in CSR form. Row a lists every b != a with
/// W_ab > 0; diagonal entries W_aa (from coarsening) are kept separately.
/// Degrees follow the matrix convention k_a = sum_b W_ab, so a self-loop
/// contributes W_aa once.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  /// Duplicate pairs are summed. Self pairs (a == b) go to the diagonal.
  WeightedGraph(std::size_t node_count, std::span<const Edge> edges,
                std::span<const double> self_weights = {});

  std::size_t size() const { return degree_.size(); }
  std::span<const std::uint32_t> neighbors(std::size_t a) const {
    return {targets_.data() + offsets_[a], offsets_[a + 1] - offsets_[a]};
  }
  std::span<const double> weights(std::size_t a) const {
    return {weights_.data() + offsets_[a], offsets_[a + 1] - offsets_[a]};
  }
  double self_weight(std::size_t a) const { return self_[a]; }
  double degree(std::size_t a) const { return degree_[a]; }
  /// 2m = sum over all matrix entries.
  double total_weight() const { return total_; }

  /// Subgraph induced by `members` (node i of the result is members[i]).
  WeightedGraph induced(std::span<const std::uint32_t> members) const;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> targets_;
  std::vector<double> weights_;
  std::vector<double> self_;
  std::vector<double> degree_;
  double total_ = 0;
};

WeightedGraph to_weighted(const SemanticGraph& graph);

/// Q = (1/2m) sum_{a,b} [W_ab - k_a k_b / 2m] delta(c_a, c_b); 0 when the
/// graph has no weight.
double modularity(const WeightedGraph& graph, std::span<const std::uint32_t> community);

struct LouvainResult {
  /// Community per node, numbered by descending size (ties: smallest node).
  std::vector<std::uint32_t> community;
  std::size_t community_count = 0;
  double modularity = 0;
  /// Q after each local-moving + coarsening pass and each refinement,
  /// starting with the singleton partition.
  std::vector<double> pass_modularity;
};

/// Sequential Louvain: local moving in a seeded random node order until no
/// single move increases Q, then coarsening, repeated until a pass changes
/// nothing. The converged partition is then refined by single-node moves on
/// the original graph and, if that raises Q, aggregated again.
///
/// `restarts` independent runs (the first with `seed`, the rest with derived
/// seeds) are made and the highest Q kept, ties to the earliest run. Runs go
/// in parallel on large graphs; the result does not depend on thread count.
LouvainResult louvain(const WeightedGraph& graph, std::uint64_t seed, std::size_t restarts = 4);

/// Renumbers arbitrary community ids by descending size, ties broken by the
/// smallest member node. Returns the number of communities.
std::size_t canonicalize(std::vector<std::uint32_t>& community);

}  // namespace semno
