#include "semno/hierarchy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include "semno/error.hpp"
#include "semno/infuse.hpp"

namespace semno {

namespace {

std::vector<std::vector<std::uint32_t>> groups_of(const LouvainResult& r,
                                                  std::span<const std::uint32_t> members) {
  std::vector<std::vector<std::uint32_t>> groups(r.community_count);
  for (std::size_t i = 0; i < r.community.size(); ++i) {
    groups[r.community[i]].push_back(members[i]);
  }
  return groups;
}

std::vector<std::size_t> path_numbers(const std::string& path) {
  std::vector<std::size_t> out;
  for (auto part : split_view(path, '-')) {
    std::size_t v = 0;
    std::from_chars(part.data(), part.data() + part.size(), v);
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<Edge> edge_list(const WeightedGraph& graph) {
  std::vector<Edge> edges;
  for (std::uint32_t a = 0; a < graph.size(); ++a) {
    const auto nb = graph.neighbors(a);
    const auto w = graph.weights(a);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (a < nb[i]) edges.push_back({a, nb[i], w[i]});
    }
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& x, const Edge& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
  return edges;
}

std::vector<Edge> degree_preserving_shuffle(std::span<const Edge> edges, Rng& rng) {
  std::vector<Edge> out(edges.begin(), edges.end());
  auto key = [](std::uint32_t a, std::uint32_t b) {
    return (std::uint64_t{std::min(a, b)} << 32) | std::max(a, b);
  };
  std::unordered_set<std::uint64_t> present;
  present.reserve(out.size() * 2);
  for (const auto& e : out) present.insert(key(e.a, e.b));
  const std::size_t m = out.size();
  if (m >= 2) {
    for (std::size_t attempt = 0; attempt < 10 * m; ++attempt) {
      const std::size_t i = uniform_below(rng, m), j = uniform_below(rng, m);
      if (i == j) continue;
      const std::uint32_t a = out[i].a, b = out[i].b;
      std::uint32_t c = out[j].a, d = out[j].b;
      if (uniform_below(rng, 2)) std::swap(c, d);
      // a-b, c-d  ->  a-d, c-b
      if (a == c || a == d || b == c || b == d) continue;
      if (present.contains(key(a, d)) || present.contains(key(c, b))) continue;
      present.erase(key(a, b));
      present.erase(key(c, d));
      present.insert(key(a, d));
      present.insert(key(c, b));
      out[i] = {std::min(a, d), std::max(a, d), out[i].weight};
      out[j] = {std::min(c, b), std::max(c, b), out[j].weight};
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Edge& x, const Edge& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
  return out;
}

NullModularity null_modularity(const WeightedGraph& graph, std::size_t samples, std::uint64_t seed) {
  NullModularity out;
  if (samples == 0) return out;
  const std::vector<Edge> edges = edge_list(graph);
  std::vector<double> self(graph.size());
  for (std::size_t a = 0; a < graph.size(); ++a) self[a] = graph.self_weight(a);
  std::vector<double> q(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, s));
    const std::vector<Edge> shuffled = degree_preserving_shuffle(edges, rng);
    q[s] = louvain(WeightedGraph(graph.size(), shuffled, self), derive_seed(seed, s + samples)).modularity;
  }
  for (double v : q) out.mean += v;
  out.mean /= static_cast<double>(samples);
  for (double v : q) out.sd += (v - out.mean) * (v - out.mean);
  out.sd = samples > 1 ? std::sqrt(out.sd / static_cast<double>(samples - 1)) : 0.0;
  return out;
}

bool path_less(const std::string& a, const std::string& b) {
  return path_numbers(a) < path_numbers(b);
}

CommunityHierarchy recursive_cluster(const SemanticGraph& graph, const HierarchyConfig& config) {
  if (config.max_depth == 0) throw ConfigError("max_depth must be at least 1");
  CommunityHierarchy h;
  h.seed = config.seed;
  const WeightedGraph wg = to_weighted(graph);

  std::vector<std::uint32_t> all(graph.nodes.size());
  for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  const LouvainResult top = louvain(wg, derive_seed(config.seed, "1"));
  h.root_modularity = top.modularity;
  for (auto& members : groups_of(top, all)) {
    HierarchyNode node;
    node.level = 1;
    node.path = std::to_string(h.nodes.size() + 1);
    node.members = std::move(members);
    h.roots.push_back(h.nodes.size());
    h.nodes.push_back(std::move(node));
  }

  std::vector<std::size_t> frontier = h.roots;
  for (std::size_t level = 2; level <= config.max_depth; ++level) {
    std::vector<std::vector<std::vector<std::uint32_t>>> splits(frontier.size());
    std::vector<double> split_q(frontier.size(), 0.0), gain(frontier.size(), 0.0);
    std::vector<NullModularity> null(frontier.size());
    const auto count = static_cast<std::ptrdiff_t>(frontier.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t f = 0; f < count; ++f) {
      const auto fi = static_cast<std::size_t>(f);
      const HierarchyNode& parent = h.nodes[frontier[fi]];
      const WeightedGraph sub = wg.induced(parent.members);
      const LouvainResult r = louvain(sub, derive_seed(config.seed, parent.path));
      split_q[fi] = r.modularity;
      auto groups = groups_of(r, parent.members);
      if (r.community_count > 1) {
        null[fi] = null_modularity(sub, config.null_samples, derive_seed(config.seed, "null-" + parent.path));
        gain[fi] = r.modularity - (null[fi].mean + config.null_z * null[fi].sd);
      }
      if (r.community_count > 1 && gain[fi] >= config.q_gain_floor) {
        splits[fi] = std::move(groups);
      } else {
        splits[fi] = {parent.members};
      }
    }
    std::vector<std::size_t> next;
    for (std::size_t fi = 0; fi < frontier.size(); ++fi) {
      const std::size_t parent = frontier[fi];
      h.nodes[parent].split = splits[fi].size() > 1;
      h.nodes[parent].split_modularity = split_q[fi];
      h.nodes[parent].split_gain = gain[fi];
      h.nodes[parent].null_mean = null[fi].mean;
      h.nodes[parent].null_sd = null[fi].sd;
      for (std::size_t c = 0; c < splits[fi].size(); ++c) {
        HierarchyNode node;
        node.level = level;
        node.path = h.nodes[parent].path + "-" + std::to_string(c + 1);
        node.members = std::move(splits[fi][c]);
        h.nodes[parent].children.push_back(h.nodes.size());
        next.push_back(h.nodes.size());
        h.nodes.push_back(std::move(node));
      }
    }
    frontier = std::move(next);
  }

  for (std::size_t idx : frontier) {
    const HierarchyNode& node = h.nodes[idx];
    if (node.members.size() < config.min_members) continue;
    Community c{node.path, node.level, {}};
    for (std::uint32_t m : node.members) c.members.push_back(graph.nodes[m]);
    std::sort(c.members.begin(), c.members.end());
    h.retained.push_back(std::move(c));
  }
  std::sort(h.retained.begin(), h.retained.end(),
            [](const Community& a, const Community& b) { return path_less(a.path, b.path); });
  return h;
}

AnchoredCommunitySet select_anchored(std::span<const Community> retained) {
  AnchoredCommunitySet out;
  out.retained_count = retained.size();
  std::vector<Community> sorted(retained.begin(), retained.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Community& a, const Community& b) { return path_less(a.path, b.path); });
  for (auto& c : sorted) {
    std::vector<std::string> concepts, anchors;
    for (const auto& m : c.members) (is_anchor(m) ? anchors : concepts).push_back(m);
    if (anchors.empty()) continue;
    out.communities.push_back(std::move(c));
    out.concepts.push_back(std::move(concepts));
    out.anchors.push_back(std::move(anchors));
  }
  if (out.communities.empty()) {
    throw RuntimeFailure("no anchored community among " + std::to_string(retained.size()) +
                         " retained communities; every sentence would be marked as noise. "
                         "Check that anchors survived training (corpus size, min_count) and "
                         "try a lower theta");
  }
  return out;
}

std::string serialize_hierarchy(const ArtifactHeader& header,
                                std::span<const Community> retained) {
  std::string out = format_header(header);
  out += '\n';
  for (const auto& c : retained) {
    const bool anchored =
        std::any_of(c.members.begin(), c.members.end(), [](const auto& m) { return is_anchor(m); });
    out += c.path;
    out += anchored ? "\t1\t" : "\t0\t";
    out += join(c.members, ",");
    out += '\n';
  }
  return out;
}

std::vector<Community> parse_hierarchy(std::string_view content, ArtifactHeader* header,
                                       std::string_view source) {
  std::vector<Community> out;
  std::size_t line_no = 0;
  for (std::string_view line : split_view(content, '\n')) {
    ++line_no;
    if (line_no == 1) {
      const ArtifactHeader h = parse_header(line, source);
      if (header) *header = h;
      continue;
    }
    if (line.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto f = split_view(line, '\t');
    if (f.size() != 3 || (f[1] != "0" && f[1] != "1")) {
      throw ArtifactError(where + ": expected 'path<TAB>0|1<TAB>members'");
    }
    Community c;
    c.path = std::string(f[0]);
    c.level = static_cast<std::size_t>(std::count(c.path.begin(), c.path.end(), '-')) + 1;
    if (!f[2].empty()) {
      for (auto m : split_view(f[2], ',')) c.members.emplace_back(m);
    }
    const bool anchored =
        std::any_of(c.members.begin(), c.members.end(), [](const auto& m) { return is_anchor(m); });
    if (anchored != (f[1] == "1")) throw ArtifactError(where + ": anchored flag disagrees with members");
    out.push_back(std::move(c));
  }
  if (line_no == 0) throw ArtifactError(std::string(source) + ": empty artifact");
  return out;
}

void save_hierarchy(const std::filesystem::path& path, const ArtifactHeader& header,
                    std::span<const Community> retained) {
  write_atomic(path, serialize_hierarchy(header, retained));
}

std::vector<Community> load_hierarchy(const std::filesystem::path& path, ArtifactHeader* header) {
  return parse_hierarchy(read_file(path), header, path.string());
}

}  // namespace semno
