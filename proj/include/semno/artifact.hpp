#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace semno {

inline constexpr int kFormatVersion = 1;

/// First line of every artifact written by the pipeline:
///
///   #semno <version> <stage> <lineage> key=value key=value ...
///
/// `lineage` is a hex digest over the configuration that produced the file
/// (including every upstream stage), `params` the same configuration in
/// readable form so a mismatch can be reported field by field.
struct ArtifactHeader {
  int version = kFormatVersion;
  std::string stage;
  std::string lineage;
  std::vector<std::pair<std::string, std::string>> params;

  const std::string* find(std::string_view key) const;
  bool operator==(const ArtifactHeader&) const = default;
};

std::string format_header(const ArtifactHeader& header);

/// Parses a header line. Throws ArtifactError naming `source` when the line
/// is not a header or carries a different format version.
ArtifactHeader parse_header(std::string_view line, std::string_view source);

/// Reads only the first line of `path`.
ArtifactHeader read_header(const std::filesystem::path& path);

/// Throws ArtifactError unless header.stage == stage.
void expect_stage(const ArtifactHeader& header, std::string_view stage,
                  const std::filesystem::path& path);

// Percent-style escaping for header values (space, tab, newline, '%', '=').
std::string escape_value(std::string_view raw);
std::string unescape_value(std::string_view escaped);

// Backslash escaping for free text inside tab-separated lines.
std::string escape_field(std::string_view raw);
std::string unescape_field(std::string_view escaped);

std::vector<std::string_view> split_view(std::string_view line, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string hex64(std::uint64_t value);

/// Writes `content` to a sibling temp file and renames it over `path`, so a
/// reader never observes a partially written artifact.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Reads a whole artifact; throws ArtifactError if it does not exist.
std::string read_file(const std::filesystem::path& path);

}  // namespace semno
