#include "semno/corpusio.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "semno/error.hpp"

namespace semno {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return i;
  }
  throw ConfigError("input is missing column '" + name + "'");
}

std::size_t parse_index(std::string_view field, std::string_view source) {
  std::size_t value = 0;
  if (field.empty()) throw ArtifactError(std::string(source) + ": empty index field");
  for (char c : field) {
    if (c < '0' || c > '9') {
      throw ArtifactError(std::string(source) + ": bad index '" + std::string(field) + "'");
    }
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  return value;
}

}  // namespace

ClassLabel::ClassLabel(std::string_view raw) {
  bool pending_gap = false;
  for (char c : trim(raw)) {
    if (is_space(c)) {
      pending_gap = true;
      continue;
    }
    if (pending_gap) name_ += '-';
    pending_gap = false;
    name_ += c;
  }
  if (name_.empty()) throw ConfigError("empty class label");
}

std::size_t Corpus::sentence_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.sentences.size();
  return n;
}

std::vector<ClassLabel> Corpus::labels() const {
  std::vector<ClassLabel> out;
  std::set<ClassLabel> seen;
  for (const auto& d : documents) {
    if (seen.insert(d.label).second) out.push_back(d.label);
  }
  return out;
}

bool read_csv_record(std::istream& in, char delimiter, std::vector<std::string>& fields,
                     bool& ok) {
  fields.clear();
  ok = true;
  int c = in.get();
  if (c == EOF) return false;
  std::string field;
  bool quoted = false;
  bool field_started_quoted = false;
  while (true) {
    if (quoted) {
      if (c == EOF) {
        ok = false;
        fields.push_back(std::move(field));
        return true;
      }
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += static_cast<char>(c);
      }
    } else if (c == EOF || c == '\n') {
      if (!field.empty() && field.back() == '\r' && !field_started_quoted) field.pop_back();
      fields.push_back(std::move(field));
      return true;
    } else if (c == '\r' && in.peek() == '\n') {
      // dropped; the '\n' ends the record
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
      field_started_quoted = false;
    } else if (c == '"' && field.empty() && !field_started_quoted) {
      quoted = true;
      field_started_quoted = true;
    } else {
      field += static_cast<char>(c);
    }
    c = in.get();
  }
}

Corpus load_corpus(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open corpus file " + path.string());
  return load_corpus(in, schema);
}

Corpus load_corpus(std::istream& in, const CsvSchema& schema) {
  Corpus corpus;
  std::vector<std::string> fields;
  bool ok = true;
  if (!read_csv_record(in, schema.delimiter, fields, ok) || !ok) {
    throw ConfigError("corpus input has no header row");
  }
  if (!fields.empty() && fields[0].starts_with("\xEF\xBB\xBF")) fields[0].erase(0, 3);
  const std::size_t class_col = column_index(fields, schema.class_column);
  const std::size_t text_col = column_index(fields, schema.text_column);
  const bool has_id = !schema.id_column.empty();
  const std::size_t id_col = has_id ? column_index(fields, schema.id_column) : 0;
  const std::size_t width = fields.size();

  std::unordered_set<std::string> ids;
  std::size_t row = 0;
  while (read_csv_record(in, schema.delimiter, fields, ok)) {
    if (fields.size() == 1 && fields[0].empty() && ok) continue;  // blank line
    ++row;
    auto warn = [&](const std::string& what) {
      corpus.warnings.push_back("row " + std::to_string(row) + ": " + what);
      ++corpus.skipped_malformed;
    };
    if (!ok) {
      warn("unterminated quoted field");
      continue;
    }
    if (fields.size() != width) {
      warn("expected " + std::to_string(width) + " fields, found " +
           std::to_string(fields.size()));
      continue;
    }
    const std::string_view text = trim(fields[text_col]);
    if (text.empty()) {
      ++corpus.skipped_empty;
      continue;
    }
    if (trim(fields[class_col]).empty()) {
      warn("empty class label");
      continue;
    }
    Document doc;
    doc.id = has_id ? std::string(trim(fields[id_col])) : "row-" + std::to_string(row);
    if (doc.id.empty() || !ids.insert(doc.id).second) {
      warn("missing or duplicate document id '" + doc.id + "'");
      continue;
    }
    doc.label = ClassLabel(fields[class_col]);
    doc.raw_text = std::string(text);
    doc.sentences = split_sentences(doc.id, doc.raw_text);
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

std::vector<RawSentence> split_sentences(std::string_view doc_id, std::string_view text) {
  std::vector<RawSentence> out;
  auto emit = [&](std::string_view piece) {
    piece = trim(piece);
    if (piece.empty()) return;
    out.push_back(RawSentence{std::string(doc_id), out.size(), std::string(piece)});
  };
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    if (i + 1 == text.size() || is_space(text[i + 1])) {
      emit(text.substr(start, i + 1 - start));
      start = i + 1;
    }
  }
  if (start < text.size()) emit(text.substr(start));
  return out;
}

std::string serialize_corpus(const ArtifactHeader& header, const Corpus& corpus) {
  std::ostringstream out;
  out << format_header(header) << '\n';
  out << "C\t" << corpus.skipped_empty << '\t' << corpus.skipped_malformed << '\n';
  for (const auto& doc : corpus.documents) {
    out << "D\t" << escape_field(doc.id) << '\t' << doc.label.name() << '\t'
        << escape_field(doc.raw_text) << '\n';
    for (const auto& s : doc.sentences) {
      out << "S\t" << s.index << '\t' << escape_field(s.text) << '\n';
    }
  }
  return out.str();
}

Corpus parse_corpus(std::string_view content, ArtifactHeader* header, std::string_view source) {
  Corpus corpus;
  std::size_t line_no = 0;
  Document* current = nullptr;
  for (std::string_view line : split_view(content, '\n')) {
    ++line_no;
    if (line_no == 1) {
      const ArtifactHeader h = parse_header(line, source);
      if (header) *header = h;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_view(line, '\t');
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    if (f[0] == "C" && f.size() == 3) {
      corpus.skipped_empty = parse_index(f[1], where);
      corpus.skipped_malformed = parse_index(f[2], where);
    } else if (f[0] == "D" && f.size() == 4) {
      Document doc;
      doc.id = unescape_field(f[1]);
      doc.label = ClassLabel(f[2]);
      doc.raw_text = unescape_field(f[3]);
      corpus.documents.push_back(std::move(doc));
      current = &corpus.documents.back();
    } else if (f[0] == "S" && f.size() == 3 && current) {
      current->sentences.push_back(
          RawSentence{current->id, parse_index(f[1], where), unescape_field(f[2])});
    } else {
      throw ArtifactError(where + ": malformed corpus line");
    }
  }
  if (line_no == 0) throw ArtifactError(std::string(source) + ": empty artifact");
  return corpus;
}

void save_corpus(const std::filesystem::path& path, const ArtifactHeader& header,
                 const Corpus& corpus) {
  write_atomic(path, serialize_corpus(header, corpus));
}

Corpus load_corpus_artifact(const std::filesystem::path& path, ArtifactHeader* header) {
  return parse_corpus(read_file(path), header, path.string());
}

}  // namespace semno
