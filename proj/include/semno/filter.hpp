#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semno/cleanse.hpp"
#include "semno/hierarchy.hpp"

namespace semno {

/// Coordinate i counts the sentence terms found in concept set W(c_i).
using CommunityEncodedVector = std::vector<std::uint32_t>;

/// term -> indices of the anchored communities whose concept set holds it.
class ConceptIndex {
 public:
  explicit ConceptIndex(const AnchoredCommunitySet& communities);

  std::size_t dimension() const { return dimension_; }
  const std::vector<std::uint32_t>* lookup(const std::string& term) const;

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<std::uint32_t>> index_;
};

CommunityEncodedVector encode_sentence(std::span<const std::string> terms,
                                       const ConceptIndex& index);

/// A sentence is semantic noise iff its encoded vector has zero norm.
bool classify_sentence(const CommunityEncodedVector& vector);

struct NoiseVerdict {
  std::string doc_id;
  std::size_t index = 0;
  ClassLabel label;
  bool is_noise = true;
  CommunityEncodedVector vector;
  /// (term, community path) for every match, in sentence order.
  std::vector<std::pair<std::string, std::string>> matched_terms;

  /// matched_terms is derived explanation and is not persisted; it does not
  /// take part in comparisons.
  bool operator==(const NoiseVerdict& o) const {
    return doc_id == o.doc_id && index == o.index && label == o.label &&
           is_noise == o.is_noise && vector == o.vector;
  }
};

struct ClassSummary {
  ClassLabel label;
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t noise = 0;
  /// Documents left with no sentence after filtering.
  std::size_t emptied_documents = 0;

  double noise_percent() const {
    return sentences ? 100.0 * static_cast<double>(noise) / static_cast<double>(sentences) : 0.0;
  }
};

struct FilterResult {
  std::vector<NoiseVerdict> verdicts;
  /// Non-noise sentences, corpus order preserved.
  std::vector<CleanSentence> retained;
  /// Per class, in first-seen order.
  std::vector<ClassSummary> summary;
};

/// Encodes and classifies every sentence (OpenMP over sentences). The
/// sentence's own class label is never consulted for the decision.
FilterResult filter_corpus(std::span<const CleanSentence> sentences,
                           const AnchoredCommunitySet& communities);

namespace serial {
FilterResult filter_corpus(std::span<const CleanSentence> sentences,
                           const AnchoredCommunitySet& communities);
}  // namespace serial

/// `doc_id<TAB>index<TAB>class<TAB>is_noise<TAB>comma-joined V_C`.
std::string serialize_verdicts(const ArtifactHeader& header, std::span<const NoiseVerdict> verdicts);
std::vector<NoiseVerdict> parse_verdicts(std::string_view content, ArtifactHeader* header,
                                         std::string_view source = "<memory>");
void save_verdicts(const std::filesystem::path& path, const ArtifactHeader& header,
                   std::span<const NoiseVerdict> verdicts);
std::vector<NoiseVerdict> load_verdicts(const std::filesystem::path& path, ArtifactHeader* header);

/// `class,sentences,noise,noise_percent,documents,emptied_documents` table.
std::string format_summary(const ArtifactHeader& header, std::span<const ClassSummary> summary);

}  // namespace semno
