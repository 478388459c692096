#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "semno/artifact.hpp"
#include "semno/corpusio.hpp"

namespace semno {

/// Immutable, lowercased stop word set.
class StopwordList {
 public:
  StopwordList(std::string language, std::vector<std::string> words);

  const std::string& language() const { return language_; }
  std::size_t size() const { return words_.size(); }
  /// Case-insensitive membership.
  bool contains(std::string_view word) const;
  /// FNV-1a over the sorted word list; recorded in artifact headers.
  std::uint64_t digest() const;

 private:
  std::string language_;
  std::unordered_set<std::string> words_;
};

/// `english` selects the built-in list; anything else is read as a file
/// with one word per line (blank lines ignored).
StopwordList load_stopwords(std::string_view path_or_tag);

struct CleanSentence {
  std::string doc_id;
  std::size_t index = 0;
  ClassLabel label;
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const CleanSentence&) const = default;
};

/// Lowercases ASCII letters and splits on every byte outside [a-z0-9].
std::vector<std::string> tokenize(std::string_view text);

CleanSentence clean_sentence(const RawSentence& sentence, const ClassLabel& label,
                             const StopwordList& stops);

/// Cleans every sentence of every document, in corpus order. Empty results
/// are kept so that sentence indices stay aligned with the raw corpus.
std::vector<CleanSentence> clean_corpus(const Corpus& corpus, const StopwordList& stops);

/// Token-list artifact shared by the cleansed, infused and filtered corpora:
/// `doc_id<TAB>index<TAB>class<TAB>space-joined tokens`.
std::string serialize_sentences(const ArtifactHeader& header,
                                std::span<const CleanSentence> sentences);
std::vector<CleanSentence> parse_sentences(std::string_view content, ArtifactHeader* header,
                                           std::string_view source = "<memory>");
void save_sentences(const std::filesystem::path& path, const ArtifactHeader& header,
                    std::span<const CleanSentence> sentences);
std::vector<CleanSentence> load_sentences(const std::filesystem::path& path,
                                          ArtifactHeader* header);

/// Non-owning token lists, the input shape of the embedding and PPMI code.
using SentenceTokens = std::vector<std::span<const std::string>>;
SentenceTokens token_views(std::span<const CleanSentence> sentences);

}  // namespace semno
