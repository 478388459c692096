#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semno/corpusio.hpp"
#include "semno/filter.hpp"

namespace semno {

struct Annotation {
  std::string doc_id;
  std::size_t index = 0;
  /// 1 = semantic noise, 0 = not noise.
  int tag = 0;
  bool operator==(const Annotation&) const = default;
};

/// Precision/recall/F1 of the noise verdicts for one class. A metric whose
/// denominator is zero is left empty rather than reported as 0.
struct ClassReport {
  ClassLabel label;
  std::size_t annotated = 0;       // sentences of this class in the sample
  std::size_t annotated_noise = 0;  // |S_a|
  std::size_t predicted_noise = 0;  // |Ŝ_a|
  std::size_t agreed_noise = 0;     // |Ŝ_a ∩ S_a|
  std::optional<double> precision, recall, f1;
};

struct MacroAverage {
  std::optional<double> precision, recall, f1;
  /// Classes contributing to each mean.
  std::size_t precision_classes = 0, recall_classes = 0, f1_classes = 0;
};

/// Scores verdicts against annotations, restricted to annotated sentences.
/// Throws RuntimeFailure listing every annotation that has no verdict.
std::vector<ClassReport> score(std::span<const NoiseVerdict> verdicts,
                               std::span<const Annotation> annotations);
MacroAverage macro_average(std::span<const ClassReport> reports);

struct SampleManifest {
  std::uint64_t seed = 0;
  std::size_t per_class = 0;
  struct Entry {
    ClassLabel label;
    std::size_t position = 0;  // index into the class's sentence list
    std::string doc_id;
    std::size_t index = 0;
    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> entries;
  std::vector<std::string> warnings;
};

/// Picks `per_class` distinct sentences of every class by drawing positions
/// from a normal distribution centred on the middle of the class's sentence
/// list (sd = range / 6), rounding, clamping and rejecting repeats. Classes
/// with no more than `per_class` sentences are taken whole, with a warning
/// when short.
SampleManifest sample_for_annotation(std::span<const NoiseVerdict> verdicts, std::size_t per_class,
                                     std::uint64_t seed);

struct SyntheticSpec {
  std::size_t classes = 4;
  std::size_t topic_vocabulary = 50;
  std::size_t noise_vocabulary = 100;
  std::size_t sentences_per_class = 2000;
  double noise_ratio = 0.3;
  std::size_t min_length = 6;
  std::size_t max_length = 12;
  std::size_t sentences_per_document = 10;
  std::uint64_t seed = 7;

  /// Throws ConfigError for zero sizes, noise_ratio outside (0, 1) or an
  /// inverted length range.
  void validate() const;
};

struct SyntheticCorpus {
  Corpus corpus;
  /// One annotation per sentence; tag 1 for planted noise.
  std::vector<Annotation> truth;
  std::vector<ClassLabel> labels;
  std::vector<std::vector<std::string>> topic_words;  // per class
  std::vector<std::string> noise_words;
};

/// Each class gets its own topic vocabulary; noise sentences draw from one
/// shared noise vocabulary. Exactly round(noise_ratio * sentences_per_class)
/// sentences per class are noise.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

/// Writes `Component,Ticket Text` rows (sentences joined by spaces); document
/// ids are the `row-N` names the loader assigns without an id column.
std::string synthetic_csv(const SyntheticCorpus& synthetic);

/// `doc_id<TAB>index<TAB>tag` lines (no header, so hand-made files load too;
/// a leading artifact header is accepted and skipped).
std::string serialize_annotations(std::span<const Annotation> annotations);
std::vector<Annotation> parse_annotations(std::string_view content,
                                          std::string_view source = "<memory>");
std::vector<Annotation> load_annotations(const std::filesystem::path& path);

std::string format_manifest(const ArtifactHeader& header, const SampleManifest& manifest);
std::string format_reports(const ArtifactHeader& header, std::span<const ClassReport> reports);

}  // namespace semno
