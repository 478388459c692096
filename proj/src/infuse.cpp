#include "semno/infuse.hpp"

#include <algorithm>

#include "semno/error.hpp"

namespace semno {

std::string anchor_surface(const ClassLabel& label) { return "A_" + label.name(); }

bool is_anchor(std::string_view token) { return token.starts_with("A_"); }

std::size_t infusion_frequency(std::size_t len) {
  if (len == 0) throw RuntimeFailure("infusion_frequency: empty sentence");
  std::size_t k = 0;
  std::size_t power = 1;  // 4^k
  while (power < len) {
    power *= 4;
    ++k;
  }
  return k;
}

std::vector<std::size_t> draw_non_adjacent(Rng& rng, std::size_t len, std::size_t count) {
  if (count == 0) return {};
  if (count > (len + 1) / 2) {
    throw RuntimeFailure("cannot place " + std::to_string(count) +
                         " non-adjacent anchors in a sentence of " + std::to_string(len) +
                         " tokens");
  }
  // Non-adjacent k-subsets of [0, len) are in bijection with plain k-subsets
  // of [0, len - k + 1) via a_j = b_j + j (b sorted). Sample b uniformly with
  // Floyd's algorithm.
  const std::size_t pool = len - count + 1;
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  for (std::size_t j = pool - count; j < pool; ++j) {
    const std::size_t t = uniform_below(rng, j + 1);
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
      chosen.push_back(t);
    } else {
      chosen.push_back(j);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t j = 0; j < chosen.size(); ++j) chosen[j] += j;
  return chosen;
}

std::uint64_t sentence_seed(std::uint64_t master, std::string_view doc_id, std::size_t index) {
  return derive_seed(derive_seed(master, doc_id), static_cast<std::uint64_t>(index));
}

InfusedSentence infuse_sentence(const CleanSentence& sentence, Rng& rng) {
  InfusedSentence out{sentence.doc_id, sentence.index, sentence.label, sentence.tokens, {}};
  if (sentence.tokens.empty()) return out;
  const std::size_t count = infusion_frequency(sentence.size());
  out.anchor_positions = draw_non_adjacent(rng, sentence.size(), count);
  const std::string anchor = anchor_surface(sentence.label);
  for (auto it = out.anchor_positions.rbegin(); it != out.anchor_positions.rend(); ++it) {
    out.tokens.insert(out.tokens.begin() + static_cast<std::ptrdiff_t>(*it), anchor);
  }
  return out;
}

std::vector<InfusedSentence> infuse_corpus(std::span<const CleanSentence> sentences,
                                           std::uint64_t seed) {
  std::vector<InfusedSentence> out(sentences.size());
  const auto n = static_cast<std::ptrdiff_t>(sentences.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const CleanSentence& s = sentences[static_cast<std::size_t>(i)];
    Rng rng(sentence_seed(seed, s.doc_id, s.index));
    out[static_cast<std::size_t>(i)] = infuse_sentence(s, rng);
  }
  return out;
}

CleanSentence strip_anchors(const InfusedSentence& sentence) {
  CleanSentence out{sentence.doc_id, sentence.index, sentence.label, {}};
  for (const auto& t : sentence.tokens) {
    if (!is_anchor(t)) out.tokens.push_back(t);
  }
  return out;
}

CleanSentence as_token_sentence(const InfusedSentence& sentence) {
  return CleanSentence{sentence.doc_id, sentence.index, sentence.label, sentence.tokens};
}

InfusedSentence from_token_sentence(const CleanSentence& sentence) {
  InfusedSentence out{sentence.doc_id, sentence.index, sentence.label, sentence.tokens, {}};
  std::size_t anchors_seen = 0;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (is_anchor(sentence.tokens[i])) {
      out.anchor_positions.push_back(i - anchors_seen);
      ++anchors_seen;
    }
  }
  return out;
}

void save_infused(const std::filesystem::path& path, const ArtifactHeader& header,
                  std::span<const InfusedSentence> sentences) {
  std::vector<CleanSentence> flat;
  flat.reserve(sentences.size());
  for (const auto& s : sentences) flat.push_back(as_token_sentence(s));
  save_sentences(path, header, flat);
}

std::vector<InfusedSentence> load_infused(const std::filesystem::path& path,
                                          ArtifactHeader* header) {
  std::vector<InfusedSentence> out;
  for (const auto& s : load_sentences(path, header)) out.push_back(from_token_sentence(s));
  return out;
}

SentenceTokens token_views(std::span<const InfusedSentence> sentences) {
  SentenceTokens views;
  views.reserve(sentences.size());
  for (const auto& s : sentences) views.emplace_back(s.tokens);
  return views;
}

}  // namespace semno
