#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semno/artifact.hpp"
#include "semno/embed.hpp"

namespace semno {

/// Cosine values are capped here before the edge weight is taken, so that
/// duplicate vectors give a large but finite weight.
inline constexpr double kMaxCosine = 1.0 - 1e-6;

struct Edge {
  std::uint32_t a = 0;  // a < b
  std::uint32_t b = 0;
  double weight = 0;
  bool operator==(const Edge&) const = default;
};

/// Undirected word-similarity graph. Edges are sorted by (a, b).
struct SemanticGraph {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  double theta = 0.6;
  bool operator==(const SemanticGraph&) const = default;
};

/// 1 / (1 - cosine) with the cosine capped at kMaxCosine.
double edge_weight(double cosine);

/// Connects every pair of words whose cosine similarity is strictly greater
/// than `theta`. All pairs are compared; rows are distributed over OpenMP
/// threads and merged in row order, so the output does not depend on the
/// thread count. Throws ConfigError unless 0 < theta < 1.
SemanticGraph build_graph(const EmbeddingModel& model, double theta);

namespace serial {
/// Single-threaded reference for build_graph.
SemanticGraph build_graph(const EmbeddingModel& model, double theta);
}  // namespace serial

/// Graph artifact: header, `nodes edges theta`, one node word per line, then
/// `wordA<TAB>wordB<TAB>weight` per edge.
void save_graph(const std::filesystem::path& path, const ArtifactHeader& header,
                const SemanticGraph& graph);
SemanticGraph load_graph(const std::filesystem::path& path, ArtifactHeader* header);
std::string serialize_graph(const ArtifactHeader& header, const SemanticGraph& graph);
SemanticGraph parse_graph(std::string_view content, ArtifactHeader* header,
                          std::string_view source = "<memory>");

}  // namespace semno
