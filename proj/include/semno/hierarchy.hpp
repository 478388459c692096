#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "semno/graph.hpp"
#include "semno/louvain.hpp"
#include "semno/rng.hpp"

namespace semno {

struct HierarchyConfig {
  std::size_t max_depth = 3;
  std::size_t min_members = 3;
  /// A community is split only if the modularity Louvain finds in its
  /// induced subgraph exceeds the null level (mean + null_z standard
  /// deviations over `null_samples` degree-preserving rewirings of that
  /// subgraph) by at least this much; otherwise it becomes its own sole child.
  double q_gain_floor = 1e-4;
  std::size_t null_samples = 16;
  double null_z = 3.0;
  std::uint64_t seed = 1;
};

struct Community {
  /// 1-based indices per level joined by '-', e.g. "1-24-3".
  std::string path;
  std::size_t level = 0;
  /// Sorted lexicographically.
  std::vector<std::string> members;
  bool operator==(const Community&) const = default;
};

struct HierarchyNode {
  std::string path;
  std::size_t level = 0;
  std::vector<std::uint32_t> members;  // graph node ids, ascending
  /// Q of the partition found inside the induced subgraph.
  double split_modularity = 0;
  /// Mean and standard deviation of Q over rewired copies of the subgraph.
  double null_mean = 0, null_sd = 0;
  /// split_modularity - (null_mean + null_z * null_sd).
  double split_gain = 0;
  bool split = false;
  std::vector<std::size_t> children;  // indices into CommunityHierarchy::nodes
};

struct CommunityHierarchy {
  std::vector<HierarchyNode> nodes;
  std::vector<std::size_t> roots;  // level-1 communities
  double root_modularity = 0;
  std::uint64_t seed = 0;
  /// Deepest-level communities with at least min_members members, by path.
  std::vector<Community> retained;
};

/// Clusters the graph with Louvain, then re-clusters every community's
/// induced subgraph down to `max_depth` levels. Sibling subgraphs are
/// processed in parallel; each uses a seed derived from its path, so the
/// result does not depend on the thread count.
CommunityHierarchy recursive_cluster(const SemanticGraph& graph, const HierarchyConfig& config);

/// Compares "1-24-3" style paths component-wise as numbers.
bool path_less(const std::string& a, const std::string& b);

/// Edges of `graph` with a < b, sorted.
std::vector<Edge> edge_list(const WeightedGraph& graph);

/// Randomizes `edges` by double-edge swaps (10 attempts per edge) that keep
/// every node's degree and never create self-loops or parallel edges. Each
/// weight stays attached to its edge. Returns the edges sorted.
std::vector<Edge> degree_preserving_shuffle(std::span<const Edge> edges, Rng& rng);

struct NullModularity {
  double mean = 0;
  double sd = 0;
};

/// Louvain modularity over `samples` degree-preserving rewirings of `graph`.
NullModularity null_modularity(const WeightedGraph& graph, std::size_t samples, std::uint64_t seed);

struct AnchoredCommunitySet {
  std::vector<Community> communities;
  /// Members of each community minus anchor tokens (the concept set).
  std::vector<std::vector<std::string>> concepts;
  /// Anchor tokens of each community.
  std::vector<std::vector<std::string>> anchors;
  /// Number of retained communities the selection was made from (M).
  std::size_t retained_count = 0;

  std::size_t size() const { return communities.size(); }
};

/// Keeps retained communities with at least one anchor member, ordered by
/// path. Throws RuntimeFailure when none qualifies.
AnchoredCommunitySet select_anchored(std::span<const Community> retained);

/// Hierarchy artifact: `path<TAB>anchored<TAB>comma-joined members` per
/// retained community, ordered by path.
void save_hierarchy(const std::filesystem::path& path, const ArtifactHeader& header,
                    std::span<const Community> retained);
std::vector<Community> load_hierarchy(const std::filesystem::path& path, ArtifactHeader* header);
std::string serialize_hierarchy(const ArtifactHeader& header, std::span<const Community> retained);
std::vector<Community> parse_hierarchy(std::string_view content, ArtifactHeader* header,
                                       std::string_view source = "<memory>");

}  // namespace semno
