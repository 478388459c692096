#include "semno/evaluate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "semno/error.hpp"
#include "semno/rng.hpp"

namespace semno {

namespace {

using SentenceKey = std::pair<std::string, std::size_t>;

std::string format_metric(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

std::vector<ClassReport> score(std::span<const NoiseVerdict> verdicts,
                               std::span<const Annotation> annotations) {
  std::map<SentenceKey, const NoiseVerdict*> by_key;
  for (const auto& v : verdicts) by_key.emplace(SentenceKey{v.doc_id, v.index}, &v);

  std::vector<ClassReport> reports;
  std::map<ClassLabel, std::size_t> slot;
  std::vector<std::string> unknown;
  std::set<SentenceKey> seen;
  for (const auto& a : annotations) {
    const auto it = by_key.find(SentenceKey{a.doc_id, a.index});
    if (it == by_key.end()) {
      unknown.push_back(a.doc_id + "#" + std::to_string(a.index));
      continue;
    }
    if (!seen.insert(it->first).second) continue;  // duplicate annotation
    const NoiseVerdict& v = *it->second;
    auto [s, fresh] = slot.emplace(v.label, reports.size());
    if (fresh) {
      ClassReport fresh_report;
      fresh_report.label = v.label;
      reports.push_back(std::move(fresh_report));
    }
    ClassReport& r = reports[s->second];
    ++r.annotated;
    const bool truth = a.tag == 1;
    r.annotated_noise += truth;
    r.predicted_noise += v.is_noise;
    r.agreed_noise += truth && v.is_noise;
  }
  if (!unknown.empty()) {
    std::string list;
    for (std::size_t i = 0; i < unknown.size() && i < 20; ++i) list += (i ? ", " : "") + unknown[i];
    if (unknown.size() > 20) list += ", ...";
    throw RuntimeFailure(std::to_string(unknown.size()) +
                         " annotation(s) reference unknown sentences: " + list);
  }
  for (auto& r : reports) {
    if (r.predicted_noise) r.precision = double(r.agreed_noise) / double(r.predicted_noise);
    if (r.annotated_noise) r.recall = double(r.agreed_noise) / double(r.annotated_noise);
    if (r.precision && r.recall && *r.precision + *r.recall > 0) {
      r.f1 = 2 * *r.precision * *r.recall / (*r.precision + *r.recall);
    }
  }
  std::sort(reports.begin(), reports.end(),
            [](const ClassReport& a, const ClassReport& b) { return a.label < b.label; });
  return reports;
}

MacroAverage macro_average(std::span<const ClassReport> reports) {
  MacroAverage m;
  double p = 0, r = 0, f = 0;
  for (const auto& rep : reports) {
    if (rep.precision) p += *rep.precision, ++m.precision_classes;
    if (rep.recall) r += *rep.recall, ++m.recall_classes;
    if (rep.f1) f += *rep.f1, ++m.f1_classes;
  }
  if (m.precision_classes) m.precision = p / double(m.precision_classes);
  if (m.recall_classes) m.recall = r / double(m.recall_classes);
  if (m.f1_classes) m.f1 = f / double(m.f1_classes);
  return m;
}

SampleManifest sample_for_annotation(std::span<const NoiseVerdict> verdicts, std::size_t per_class,
                                     std::uint64_t seed) {
  SampleManifest manifest;
  manifest.seed = seed;
  manifest.per_class = per_class;
  std::map<ClassLabel, std::vector<const NoiseVerdict*>> by_class;
  for (const auto& v : verdicts) by_class[v.label].push_back(&v);

  for (const auto& [label, list] : by_class) {
    const std::size_t count = list.size();
    std::vector<std::size_t> picked;
    if (count <= per_class) {
      if (count < per_class) {
        manifest.warnings.push_back(label.name() + ": only " + std::to_string(count) +
                                    " sentences, all selected");
      }
      for (std::size_t i = 0; i < count; ++i) picked.push_back(i);
    } else {
      Rng rng(derive_seed(seed, label.name()));
      const double range = static_cast<double>(count - 1);
      const double mean = range / 2.0;
      const double sd = range / 6.0;
      std::vector<bool> taken(count, false);
      const std::size_t max_draws = 1000000 + 1000 * per_class;
      for (std::size_t draw = 0; picked.size() < per_class && draw < max_draws; ++draw) {
        const double x = std::round(mean + sd * standard_normal(rng));
        const auto pos = static_cast<std::size_t>(std::clamp(x, 0.0, range));
        if (taken[pos]) continue;
        taken[pos] = true;
        picked.push_back(pos);
      }
      if (picked.size() < per_class) {
        manifest.warnings.push_back(label.name() +
                                    ": rejection sampling stalled; filled from the centre out");
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < count; ++i) {
          if (!taken[i]) rest.push_back(i);
        }
        std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
          return std::abs(double(a) - mean) < std::abs(double(b) - mean);
        });
        for (std::size_t i = 0; picked.size() < per_class; ++i) picked.push_back(rest[i]);
      }
      std::sort(picked.begin(), picked.end());
    }
    for (std::size_t pos : picked) {
      manifest.entries.push_back({label, pos, list[pos]->doc_id, list[pos]->index});
    }
  }
  return manifest;
}

void SyntheticSpec::validate() const {
  if (classes == 0 || topic_vocabulary == 0 || noise_vocabulary == 0 || sentences_per_class == 0 ||
      min_length == 0 || sentences_per_document == 0) {
    throw ConfigError("synthetic corpus sizes must be positive");
  }
  if (!(noise_ratio > 0.0 && noise_ratio < 1.0)) throw ConfigError("noise ratio must lie in (0, 1)");
  if (max_length < min_length) throw ConfigError("sentence length range is inverted");
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticCorpus out;
  // Distinct prefixes keep the vocabularies disjoint by construction.
  for (std::size_t c = 0; c < spec.classes; ++c) {
    out.labels.emplace_back("Class-" + std::to_string(c + 1));
    std::vector<std::string> words;
    for (std::size_t j = 0; j < spec.topic_vocabulary; ++j) {
      words.push_back("c" + std::to_string(c + 1) + "w" + std::to_string(j + 1));
    }
    out.topic_words.push_back(std::move(words));
  }
  for (std::size_t j = 0; j < spec.noise_vocabulary; ++j) {
    out.noise_words.push_back("nz" + std::to_string(j + 1));
  }

  const auto noise_count = static_cast<std::size_t>(
      std::llround(spec.noise_ratio * static_cast<double>(spec.sentences_per_class)));
  for (std::size_t c = 0; c < spec.classes; ++c) {
    Rng rng(derive_seed(spec.seed, "class-" + std::to_string(c)));
    std::vector<std::size_t> slots(spec.sentences_per_class);
    for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
    for (std::size_t i = 0; i < noise_count; ++i) {
      std::swap(slots[i], slots[i + uniform_below(rng, slots.size() - i)]);
    }
    std::vector<bool> is_noise(spec.sentences_per_class, false);
    for (std::size_t i = 0; i < noise_count; ++i) is_noise[slots[i]] = true;

    Document doc;
    auto flush = [&] {
      if (doc.sentences.empty()) return;
      out.corpus.documents.push_back(std::move(doc));
      doc = Document{};
    };
    for (std::size_t s = 0; s < spec.sentences_per_class; ++s) {
      if (s % spec.sentences_per_document == 0) {
        flush();
        // The name the CSV loader assigns when no id column is configured.
        doc.id = "row-" + std::to_string(out.corpus.documents.size() + 1);
        doc.label = out.labels[c];
      }
      const auto& pool = is_noise[s] ? out.noise_words : out.topic_words[c];
      const std::size_t len =
          spec.min_length + uniform_below(rng, spec.max_length - spec.min_length + 1);
      std::string text;
      for (std::size_t w = 0; w < len; ++w) {
        if (w) text += ' ';
        text += pool[uniform_below(rng, pool.size())];
      }
      text += '.';
      const std::size_t index = doc.sentences.size();
      out.truth.push_back(Annotation{doc.id, index, is_noise[s] ? 1 : 0});
      if (!doc.raw_text.empty()) doc.raw_text += ' ';
      doc.raw_text += text;
      doc.sentences.push_back(RawSentence{doc.id, index, std::move(text)});
    }
    flush();
  }
  return out;
}

std::string synthetic_csv(const SyntheticCorpus& synthetic) {
  std::string out = "Component,Ticket Text\n";
  for (const auto& d : synthetic.corpus.documents) {
    out += d.label.name() + ",\"";
    for (char c : d.raw_text) {
      if (c == '"') out += '"';
      out += c;
    }
    out += "\"\n";
  }
  return out;
}

std::string serialize_annotations(std::span<const Annotation> annotations) {
  std::string out;
  for (const auto& a : annotations) {
    out += escape_field(a.doc_id) + '\t' + std::to_string(a.index) + '\t' + std::to_string(a.tag) + '\n';
  }
  return out;
}

std::vector<Annotation> parse_annotations(std::string_view content, std::string_view source) {
  std::vector<Annotation> out;
  std::size_t line_no = 0;
  for (std::string_view line : split_view(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto f = split_view(line, '\t');
    if (f.size() != 3 || (f[2] != "0" && f[2] != "1")) {
      throw ArtifactError(where + ": expected 'doc_id<TAB>index<TAB>0|1'");
    }
    Annotation a;
    a.doc_id = unescape_field(f[0]);
    if (std::from_chars(f[1].data(), f[1].data() + f[1].size(), a.index).ec != std::errc()) {
      throw ArtifactError(where + ": bad sentence index");
    }
    a.tag = f[2] == "1" ? 1 : 0;
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<Annotation> load_annotations(const std::filesystem::path& path) {
  return parse_annotations(read_file(path), path.string());
}

std::string format_manifest(const ArtifactHeader& header, const SampleManifest& manifest) {
  std::string out = format_header(header) + '\n';
  out += "# seed=" + std::to_string(manifest.seed) + " per_class=" +
         std::to_string(manifest.per_class) + " support=sentence-index distribution=normal\n";
  for (const auto& w : manifest.warnings) out += "# warning: " + w + '\n';
  out += "class\tposition\tdoc_id\tindex\n";
  for (const auto& e : manifest.entries) {
    out += e.label.name() + '\t' + std::to_string(e.position) + '\t' + escape_field(e.doc_id) +
           '\t' + std::to_string(e.index) + '\n';
  }
  return out;
}

std::string format_reports(const ArtifactHeader& header, std::span<const ClassReport> reports) {
  std::string out = format_header(header) + '\n';
  out += "class,sampled,annotated_noise,predicted_noise,agreed_noise,precision,recall,f1\n";
  for (const auto& r : reports) {
    out += r.label.name() + ',' + std::to_string(r.annotated) + ',' +
           std::to_string(r.annotated_noise) + ',' + std::to_string(r.predicted_noise) + ',' +
           std::to_string(r.agreed_noise) + ',' + format_metric(r.precision) + ',' +
           format_metric(r.recall) + ',' + format_metric(r.f1) + '\n';
  }
  const MacroAverage m = macro_average(reports);
  out += "macro,,,,," + format_metric(m.precision) + ',' + format_metric(m.recall) + ',' +
         format_metric(m.f1) + '\n';
  return out;
}

}  // namespace semno
