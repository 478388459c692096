#include "semno/filter.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>

#include "semno/error.hpp"

namespace semno {

ConceptIndex::ConceptIndex(const AnchoredCommunitySet& communities)
    : dimension_(communities.size()) {
  for (std::size_t i = 0; i < communities.concepts.size(); ++i) {
    for (const auto& term : communities.concepts[i]) {
      auto& slots = index_[term];
      if (slots.empty() || slots.back() != i) slots.push_back(static_cast<std::uint32_t>(i));
    }
  }
}

const std::vector<std::uint32_t>* ConceptIndex::lookup(const std::string& term) const {
  const auto it = index_.find(term);
  return it == index_.end() ? nullptr : &it->second;
}

CommunityEncodedVector encode_sentence(std::span<const std::string> terms,
                                       const ConceptIndex& index) {
  CommunityEncodedVector v(index.dimension(), 0);
  for (const auto& t : terms) {
    if (const auto* slots = index.lookup(t)) {
      for (std::uint32_t i : *slots) ++v[i];
    }
  }
  return v;
}

bool classify_sentence(const CommunityEncodedVector& vector) {
  return std::all_of(vector.begin(), vector.end(), [](std::uint32_t x) { return x == 0; });
}

namespace {

NoiseVerdict judge(const CleanSentence& s, const ConceptIndex& index,
                   const AnchoredCommunitySet& communities) {
  NoiseVerdict v{s.doc_id, s.index, s.label, true, encode_sentence(s.tokens, index), {}};
  v.is_noise = classify_sentence(v.vector);
  for (const auto& t : s.tokens) {
    if (const auto* slots = index.lookup(t)) {
      for (std::uint32_t i : *slots) v.matched_terms.emplace_back(t, communities.communities[i].path);
    }
  }
  return v;
}

FilterResult assemble(std::span<const CleanSentence> sentences, std::vector<NoiseVerdict> verdicts) {
  FilterResult out;
  out.verdicts = std::move(verdicts);
  std::map<ClassLabel, std::size_t> slot;
  std::string current_doc;
  bool doc_open = false;
  bool doc_kept_any = false;
  std::size_t doc_slot = 0;
  auto close_doc = [&] {
    if (doc_open && !doc_kept_any) ++out.summary[doc_slot].emptied_documents;
  };
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const CleanSentence& s = sentences[i];
    auto [it, fresh] = slot.emplace(s.label, out.summary.size());
    if (fresh) out.summary.push_back(ClassSummary{s.label, 0, 0, 0, 0});
    ClassSummary& cs = out.summary[it->second];
    if (!doc_open || s.doc_id != current_doc) {
      close_doc();
      current_doc = s.doc_id;
      doc_open = true;
      doc_kept_any = false;
      doc_slot = it->second;
      ++cs.documents;
    }
    ++cs.sentences;
    if (out.verdicts[i].is_noise) {
      ++cs.noise;
    } else {
      doc_kept_any = true;
      out.retained.push_back(s);
    }
  }
  close_doc();
  return out;
}

}  // namespace

FilterResult filter_corpus(std::span<const CleanSentence> sentences,
                           const AnchoredCommunitySet& communities) {
  const ConceptIndex index(communities);
  std::vector<NoiseVerdict> verdicts(sentences.size());
  const auto n = static_cast<std::ptrdiff_t>(sentences.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    verdicts[k] = judge(sentences[k], index, communities);
  }
  return assemble(sentences, std::move(verdicts));
}

namespace serial {

FilterResult filter_corpus(std::span<const CleanSentence> sentences,
                           const AnchoredCommunitySet& communities) {
  const ConceptIndex index(communities);
  std::vector<NoiseVerdict> verdicts;
  verdicts.reserve(sentences.size());
  for (const auto& s : sentences) verdicts.push_back(judge(s, index, communities));
  return assemble(sentences, std::move(verdicts));
}

}  // namespace serial

std::string serialize_verdicts(const ArtifactHeader& header,
                               std::span<const NoiseVerdict> verdicts) {
  std::string out = format_header(header);
  out += '\n';
  for (const auto& v : verdicts) {
    out += escape_field(v.doc_id);
    out += '\t';
    out += std::to_string(v.index);
    out += '\t';
    out += v.label.name();
    out += v.is_noise ? "\t1\t" : "\t0\t";
    for (std::size_t i = 0; i < v.vector.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(v.vector[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<NoiseVerdict> parse_verdicts(std::string_view content, ArtifactHeader* header,
                                         std::string_view source) {
  std::vector<NoiseVerdict> out;
  std::size_t line_no = 0;
  for (std::string_view line : split_view(content, '\n')) {
    ++line_no;
    if (line_no == 1) {
      const ArtifactHeader h = parse_header(line, source);
      if (header) *header = h;
      continue;
    }
    if (line.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto f = split_view(line, '\t');
    if (f.size() != 5 || (f[3] != "0" && f[3] != "1")) {
      throw ArtifactError(where + ": malformed verdict line");
    }
    NoiseVerdict v;
    v.doc_id = unescape_field(f[0]);
    if (std::from_chars(f[1].data(), f[1].data() + f[1].size(), v.index).ec != std::errc()) {
      throw ArtifactError(where + ": bad sentence index");
    }
    v.label = ClassLabel(f[2]);
    v.is_noise = f[3] == "1";
    if (!f[4].empty()) {
      for (auto x : split_view(f[4], ',')) {
        std::uint32_t value = 0;
        if (std::from_chars(x.data(), x.data() + x.size(), value).ec != std::errc()) {
          throw ArtifactError(where + ": bad vector entry");
        }
        v.vector.push_back(value);
      }
    }
    if (v.is_noise != classify_sentence(v.vector)) {
      throw ArtifactError(where + ": noise flag disagrees with the encoded vector");
    }
    out.push_back(std::move(v));
  }
  if (line_no == 0) throw ArtifactError(std::string(source) + ": empty artifact");
  return out;
}

void save_verdicts(const std::filesystem::path& path, const ArtifactHeader& header,
                   std::span<const NoiseVerdict> verdicts) {
  write_atomic(path, serialize_verdicts(header, verdicts));
}

std::vector<NoiseVerdict> load_verdicts(const std::filesystem::path& path, ArtifactHeader* header) {
  return parse_verdicts(read_file(path), header, path.string());
}

std::string format_summary(const ArtifactHeader& header, std::span<const ClassSummary> summary) {
  std::string out = format_header(header);
  out += "\nclass,sentences,noise,noise_percent,documents,emptied_documents\n";
  char buf[64];
  std::size_t sentences = 0, noise = 0, documents = 0, emptied = 0;
  for (const auto& s : summary) {
    std::snprintf(buf, sizeof buf, "%.2f", s.noise_percent());
    out += s.label.name() + ',' + std::to_string(s.sentences) + ',' + std::to_string(s.noise) +
           ',' + buf + ',' + std::to_string(s.documents) + ',' +
           std::to_string(s.emptied_documents) + '\n';
    sentences += s.sentences;
    noise += s.noise;
    documents += s.documents;
    emptied += s.emptied_documents;
  }
  std::snprintf(buf, sizeof buf, "%.2f",
                sentences ? 100.0 * static_cast<double>(noise) / static_cast<double>(sentences) : 0.0);
  out += "total," + std::to_string(sentences) + ',' + std::to_string(noise) + ',' + buf + ',' +
         std::to_string(documents) + ',' + std::to_string(emptied) + '\n';
  return out;
}

}  // namespace semno
