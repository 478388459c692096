#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semno/cleanse.hpp"
#include "semno/rng.hpp"

namespace semno {

/// Anchor surface for a class: "A_" + label. Corpus tokens never contain
/// '_' or upper case, so anchors cannot collide with them.
std::string anchor_surface(const ClassLabel& label);
bool is_anchor(std::string_view token);

/// Number of anchors for a clean sentence of `len` tokens:
/// ceil(log2(len) / 2), i.e. the smallest k with 4^k >= len.
/// Requires len >= 1.
std::size_t infusion_frequency(std::size_t len);

/// Draws `count` pairwise non-adjacent indices from [0, len), uniformly over
/// all such subsets, returned sorted. Throws RuntimeFailure when no such
/// subset exists (count > ceil(len / 2)).
std::vector<std::size_t> draw_non_adjacent(Rng& rng, std::size_t len, std::size_t count);

struct InfusedSentence {
  std::string doc_id;
  std::size_t index = 0;
  ClassLabel label;
  std::vector<std::string> tokens;
  /// Indices into the clean sentence; an anchor sits right before each.
  std::vector<std::size_t> anchor_positions;

  bool operator==(const InfusedSentence&) const = default;
};

/// Sub-seed for one sentence, independent of corpus order.
std::uint64_t sentence_seed(std::uint64_t master, std::string_view doc_id, std::size_t index);

InfusedSentence infuse_sentence(const CleanSentence& sentence, Rng& rng);

/// Empty sentences pass through with no anchors.
std::vector<InfusedSentence> infuse_corpus(std::span<const CleanSentence> sentences,
                                           std::uint64_t seed);

CleanSentence strip_anchors(const InfusedSentence& sentence);

/// Token-list view of an infused sentence (anchors included) for artifacts.
CleanSentence as_token_sentence(const InfusedSentence& sentence);
/// Inverse of as_token_sentence; anchor positions are recovered from the
/// anchor tokens.
InfusedSentence from_token_sentence(const CleanSentence& sentence);

void save_infused(const std::filesystem::path& path, const ArtifactHeader& header,
                  std::span<const InfusedSentence> sentences);
std::vector<InfusedSentence> load_infused(const std::filesystem::path& path,
                                          ArtifactHeader* header);

SentenceTokens token_views(std::span<const InfusedSentence> sentences);

}  // namespace semno
