#include "semno/cleanse.hpp"

#include <sstream>

#include "semno/error.hpp"

namespace semno {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : text) {
    char c = raw;
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      current += c;
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

CleanSentence clean_sentence(const RawSentence& sentence, const ClassLabel& label,
                             const StopwordList& stops) {
  CleanSentence out{sentence.doc_id, sentence.index, label, {}};
  for (auto& token : tokenize(sentence.text)) {
    if (!stops.contains(token)) out.tokens.push_back(std::move(token));
  }
  return out;
}

std::vector<CleanSentence> clean_corpus(const Corpus& corpus, const StopwordList& stops) {
  std::vector<std::size_t> offsets(corpus.documents.size() + 1, 0);
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    offsets[d + 1] = offsets[d] + corpus.documents[d].sentences.size();
  }
  std::vector<CleanSentence> out(offsets.back());
  const auto n_docs = static_cast<std::ptrdiff_t>(corpus.documents.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t d = 0; d < n_docs; ++d) {
    const Document& doc = corpus.documents[static_cast<std::size_t>(d)];
    std::size_t slot = offsets[static_cast<std::size_t>(d)];
    for (const auto& s : doc.sentences) out[slot++] = clean_sentence(s, doc.label, stops);
  }
  return out;
}

std::string serialize_sentences(const ArtifactHeader& header,
                                std::span<const CleanSentence> sentences) {
  std::string out = format_header(header);
  out += '\n';
  for (const auto& s : sentences) {
    out += escape_field(s.doc_id);
    out += '\t';
    out += std::to_string(s.index);
    out += '\t';
    out += s.label.name();
    out += '\t';
    out += join(s.tokens, " ");
    out += '\n';
  }
  return out;
}

std::vector<CleanSentence> parse_sentences(std::string_view content, ArtifactHeader* header,
                                           std::string_view source) {
  std::vector<CleanSentence> out;
  std::size_t line_no = 0;
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
    if (f.size() != 4) throw ArtifactError(where + ": expected 4 tab-separated fields");
    CleanSentence s;
    s.doc_id = unescape_field(f[0]);
    try {
      std::size_t used = 0;
      s.index = std::stoul(std::string(f[1]), &used);
      if (used != f[1].size()) throw std::invalid_argument("index");
    } catch (const std::exception&) {
      throw ArtifactError(where + ": bad sentence index");
    }
    s.label = ClassLabel(f[2]);
    if (!f[3].empty()) {
      for (auto t : split_view(f[3], ' ')) s.tokens.emplace_back(t);
    }
    out.push_back(std::move(s));
  }
  if (line_no == 0) throw ArtifactError(std::string(source) + ": empty artifact");
  return out;
}

void save_sentences(const std::filesystem::path& path, const ArtifactHeader& header,
                    std::span<const CleanSentence> sentences) {
  write_atomic(path, serialize_sentences(header, sentences));
}

std::vector<CleanSentence> load_sentences(const std::filesystem::path& path,
                                          ArtifactHeader* header) {
  return parse_sentences(read_file(path), header, path.string());
}

SentenceTokens token_views(std::span<const CleanSentence> sentences) {
  SentenceTokens views;
  views.reserve(sentences.size());
  for (const auto& s : sentences) views.emplace_back(s.tokens);
  return views;
}

}  // namespace semno
