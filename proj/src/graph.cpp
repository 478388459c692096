#include "semno/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>

#include "semno/error.hpp"

namespace semno {

namespace {

void check_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ConfigError("theta must lie in (0, 1), got " + std::to_string(theta));
  }
}

std::vector<double> norms(const EmbeddingModel& model) {
  std::vector<double> out(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    double sq = 0;
    for (float x : model.vector(i)) sq += static_cast<double>(x) * x;
    if (sq == 0) throw RuntimeFailure("word '" + model.words[i] + "' has a zero vector");
    out[i] = std::sqrt(sq);
  }
  return out;
}

// Edges (row, j) for j > row.
void scan_row(const EmbeddingModel& model, const std::vector<double>& norm, std::size_t row,
              double theta, std::vector<Edge>& out) {
  const auto a = model.vector(row);
  for (std::size_t j = row + 1; j < model.size(); ++j) {
    const auto b = model.vector(j);
    double dot = 0;
    for (std::size_t d = 0; d < model.dim; ++d) dot += static_cast<double>(a[d]) * b[d];
    const double cos = dot / (norm[row] * norm[j]);
    if (cos > theta) {
      out.push_back(Edge{static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(j),
                         edge_weight(cos)});
    }
  }
}

}  // namespace

double edge_weight(double cosine) { return 1.0 / (1.0 - std::min(cosine, kMaxCosine)); }

SemanticGraph build_graph(const EmbeddingModel& model, double theta) {
  check_theta(theta);
  SemanticGraph graph{model.words, {}, theta};
  const std::vector<double> norm = norms(model);
  const auto n = static_cast<std::ptrdiff_t>(model.size());
  std::vector<std::vector<Edge>> rows(model.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    scan_row(model, norm, static_cast<std::size_t>(i), theta, rows[static_cast<std::size_t>(i)]);
  }
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  graph.edges.reserve(total);
  for (const auto& r : rows) graph.edges.insert(graph.edges.end(), r.begin(), r.end());
  return graph;
}

namespace serial {

SemanticGraph build_graph(const EmbeddingModel& model, double theta) {
  check_theta(theta);
  SemanticGraph graph{model.words, {}, theta};
  const std::vector<double> norm = norms(model);
  for (std::size_t i = 0; i < model.size(); ++i) scan_row(model, norm, i, theta, graph.edges);
  return graph;
}

}  // namespace serial

std::string serialize_graph(const ArtifactHeader& header, const SemanticGraph& graph) {
  std::string out = format_header(header);
  out += '\n';
  char buf[64];
  std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", graph.nodes.size(), graph.edges.size(),
                graph.theta);
  out += buf;
  for (const auto& w : graph.nodes) {
    out += w;
    out += '\n';
  }
  for (const auto& e : graph.edges) {
    out += graph.nodes[e.a];
    out += '\t';
    out += graph.nodes[e.b];
    std::snprintf(buf, sizeof buf, "\t%.17g\n", e.weight);
    out += buf;
  }
  return out;
}

SemanticGraph parse_graph(std::string_view content, ArtifactHeader* header,
                          std::string_view source) {
  const std::string src(source);
  const auto lines = split_view(content, '\n');
  if (lines.size() < 2) throw ArtifactError(src + ": truncated graph artifact");
  const ArtifactHeader h = parse_header(lines[0], source);
  if (header) *header = h;
  SemanticGraph graph;
  std::size_t n_nodes = 0, n_edges = 0;
  {
    const auto f = split_view(lines[1], ' ');
    if (f.size() != 3) throw ArtifactError(src + ": expected 'nodes edges theta'");
    try {
      n_nodes = std::stoul(std::string(f[0]));
      n_edges = std::stoul(std::string(f[1]));
      graph.theta = std::stod(std::string(f[2]));
    } catch (const std::exception&) {
      throw ArtifactError(src + ": unreadable 'nodes edges theta' line");
    }
  }
  if (lines.size() < 2 + n_nodes + n_edges) throw ArtifactError(src + ": truncated graph artifact");
  std::unordered_map<std::string, std::uint32_t> ids;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    graph.nodes.emplace_back(lines[2 + i]);
    ids.emplace(graph.nodes.back(), static_cast<std::uint32_t>(i));
  }
  for (std::size_t i = 0; i < n_edges; ++i) {
    const std::size_t ln = 2 + n_nodes + i;
    const auto f = split_view(lines[ln], '\t');
    const std::string where = src + ":" + std::to_string(ln + 1);
    if (f.size() != 3) throw ArtifactError(where + ": expected 3 fields");
    const auto a = ids.find(std::string(f[0]));
    const auto b = ids.find(std::string(f[1]));
    if (a == ids.end() || b == ids.end()) throw ArtifactError(where + ": unknown node");
    const std::string w(f[2]);
    char* end = nullptr;
    const double weight = std::strtod(w.c_str(), &end);
    if (end != w.c_str() + w.size()) throw ArtifactError(where + ": bad weight");
    graph.edges.push_back(Edge{std::min(a->second, b->second), std::max(a->second, b->second),
                               weight});
  }
  return graph;
}

void save_graph(const std::filesystem::path& path, const ArtifactHeader& header,
                const SemanticGraph& graph) {
  write_atomic(path, serialize_graph(header, graph));
}

SemanticGraph load_graph(const std::filesystem::path& path, ArtifactHeader* header) {
  return parse_graph(read_file(path), header, path.string());
}

}  // namespace semno
