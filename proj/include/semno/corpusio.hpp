#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "semno/artifact.hpp"

namespace semno {

/// Category name with whitespace runs replaced by '-', e.g. "Service Brakes"
/// becomes "Service-Brakes".
class ClassLabel {
 public:
  ClassLabel() = default;
  /// Normalizes `raw`; throws ConfigError if nothing but whitespace remains.
  explicit ClassLabel(std::string_view raw);

  const std::string& name() const { return name_; }
  auto operator<=>(const ClassLabel&) const = default;

 private:
  std::string name_;
};

struct RawSentence {
  std::string doc_id;
  std::size_t index = 0;
  std::string text;
  bool operator==(const RawSentence&) const = default;
};

struct Document {
  std::string id;
  ClassLabel label;
  std::string raw_text;
  std::vector<RawSentence> sentences;
  bool operator==(const Document&) const = default;
};

struct Corpus {
  std::vector<Document> documents;
  std::size_t skipped_empty = 0;
  std::size_t skipped_malformed = 0;
  std::vector<std::string> warnings;

  std::size_t sentence_count() const;
  /// Documents and skip counters; warnings are diagnostics only.
  bool operator==(const Corpus& other) const {
    return documents == other.documents && skipped_empty == other.skipped_empty &&
           skipped_malformed == other.skipped_malformed;
  }
  /// Distinct labels in first-seen order.
  std::vector<ClassLabel> labels() const;
};

struct CsvSchema {
  std::string class_column = "Component";
  std::string text_column = "Ticket Text";
  /// Optional; rows are numbered "row-<n>" when empty.
  std::string id_column;
  char delimiter = ',';
};

/// RFC-4180 record reader. Quoted fields may contain the delimiter, doubled
/// quotes and line breaks. Returns false at end of input; sets `ok` to false
/// on an unterminated quote.
bool read_csv_record(std::istream& in, char delimiter, std::vector<std::string>& fields,
                     bool& ok);

Corpus load_corpus(const std::filesystem::path& path, const CsvSchema& schema);
Corpus load_corpus(std::istream& in, const CsvSchema& schema);

/// Splits on '.', '?' or '!' followed by whitespace or end of text. Every
/// sentence keeps its terminator; surrounding whitespace is trimmed.
std::vector<RawSentence> split_sentences(std::string_view doc_id, std::string_view text);
inline std::vector<RawSentence> split_sentences(const Document& doc) {
  return split_sentences(doc.id, doc.raw_text);
}

/// Corpus artifact: one `D` line per document followed by its `S` lines.
std::string serialize_corpus(const ArtifactHeader& header, const Corpus& corpus);
Corpus parse_corpus(std::string_view content, ArtifactHeader* header,
                    std::string_view source = "<memory>");
void save_corpus(const std::filesystem::path& path, const ArtifactHeader& header,
                 const Corpus& corpus);
Corpus load_corpus_artifact(const std::filesystem::path& path, ArtifactHeader* header);

}  // namespace semno
