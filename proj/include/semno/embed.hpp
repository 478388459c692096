#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "semno/artifact.hpp"
#include "semno/cleanse.hpp"

namespace semno {

/// Skip-gram / negative-sampling hyperparameters.
struct TrainConfig {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  double subsample = 1e-3;
  std::size_t min_count = 5;
  std::uint64_t seed = 1;
  /// 1 = strict serial mode (bitwise reproducible); >1 = lock-free workers.
  int threads = 1;

  /// Throws ConfigError on non-positive values.
  void validate() const;
  std::vector<std::pair<std::string, std::string>> describe() const;
  /// Compares everything except `threads`.
  bool operator==(const TrainConfig& o) const {
    return dim == o.dim && window == o.window && negatives == o.negatives &&
           epochs == o.epochs && learning_rate == o.learning_rate &&
           subsample == o.subsample && min_count == o.min_count && seed == o.seed;
  }
};

/// Dense word ids ordered by descending count, ties lexicographic.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts);

  std::size_t size() const { return words_.size(); }
  const std::string& word(std::size_t id) const { return words_[id]; }
  std::uint64_t count(std::size_t id) const { return counts_[id]; }
  std::optional<std::size_t> find(std::string_view word) const;
  const std::vector<std::string>& words() const { return words_; }
  std::uint64_t total() const { return total_; }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::uint64_t total_ = 0;
};

/// Counts every token; keeps words with count >= min_count plus every anchor.
/// Throws RuntimeFailure if the corpus has no tokens.
Vocabulary build_vocab(const SentenceTokens& sentences, std::size_t min_count);

/// Row-major |V| x dim input vectors.
struct EmbeddingModel {
  std::vector<std::string> words;
  std::size_t dim = 0;
  std::vector<float> vectors;
  TrainConfig config;

  std::size_t size() const { return words.size(); }
  std::span<const float> vector(std::size_t id) const {
    return {vectors.data() + id * dim, dim};
  }
  std::optional<std::size_t> find(std::string_view word) const;
  bool operator==(const EmbeddingModel&) const = default;
};

struct TrainResult {
  EmbeddingModel model;
  /// Mean negative-sampling loss per (center, context) pair, per epoch.
  std::vector<double> epoch_loss;
};

/// Trains input vectors with skip-gram and negative sampling. Throws
/// RuntimeFailure if training produces a non-finite value.
TrainResult train(const SentenceTokens& sentences, const TrainConfig& config);

/// Cosine similarity; throws RuntimeFailure if either vector is zero.
double cosine(std::span<const float> a, std::span<const float> b);

inline double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

/// Loss and gradient of the negative-sampling objective for one center
/// vector against `outputs` (row 0 = observed context, remaining rows =
/// negative samples, each `center.size()` wide):
///
///   L = -log s(u_0 . v) - sum_k log s(-u_k . v)
///
/// Writes dL/dv into `center_grad` and dL/du_r into row r of `output_grads`.
template <class T>
T negative_sampling_gradient(std::span<const T> center, std::span<const T> outputs,
                             std::span<T> center_grad, std::span<T> output_grads) {
  const std::size_t dim = center.size();
  const std::size_t rows = outputs.size() / dim;
  T loss = 0;
  for (std::size_t d = 0; d < dim; ++d) center_grad[d] = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const T* u = outputs.data() + r * dim;
    T dot = 0;
    for (std::size_t d = 0; d < dim; ++d) dot += u[d] * center[d];
    const T label = r == 0 ? T(1) : T(0);
    const T score = static_cast<T>(1.0 / (1.0 + std::exp(-static_cast<double>(dot))));
    const T sign = r == 0 ? T(1) : T(-1);
    loss -= static_cast<T>(log_sigmoid(static_cast<double>(sign * dot)));
    const T g = score - label;
    T* ug = output_grads.data() + r * dim;
    for (std::size_t d = 0; d < dim; ++d) {
      center_grad[d] += g * u[d];
      ug[d] = g * center[d];
    }
  }
  return loss;
}

/// Text model: header line, `|V| dim`, then `word v1 ... vdim` per word.
/// The loader also accepts plain word2vec text files without the header.
void save_model(const std::filesystem::path& path, const ArtifactHeader& header,
                const EmbeddingModel& model);
EmbeddingModel load_model(const std::filesystem::path& path, ArtifactHeader* header);
std::string serialize_model(const ArtifactHeader& header, const EmbeddingModel& model);
EmbeddingModel parse_model(std::string_view content, ArtifactHeader* header,
                           std::string_view source = "<memory>");

}  // namespace semno
