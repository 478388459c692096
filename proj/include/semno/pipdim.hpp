#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "semno/cleanse.hpp"

namespace semno {

/// Dense symmetric matrix, row-major.
struct SymmetricMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t side) : n(side), values(side * side, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

/// The `max_vocab` most frequent words, ties broken lexicographically.
std::vector<std::string> top_vocabulary(const SentenceTokens& sentences, std::size_t max_vocab);

/// Symmetric co-occurrence counts of vocabulary words at distance 1..window
/// inside a sentence. Sentences are split across OpenMP threads with one
/// sparse count map per thread; counts are integers so the merge is exact.
SymmetricMatrix cooccurrence_counts(const SentenceTokens& sentences,
                                    std::span<const std::string> vocab, std::size_t window);

namespace serial {
SymmetricMatrix cooccurrence_counts(const SentenceTokens& sentences,
                                    std::span<const std::string> vocab, std::size_t window);
}  // namespace serial

/// max(0, log(C_ab * D / (C_a * C_b))); zero where C_ab = 0.
SymmetricMatrix ppmi_from_counts(const SymmetricMatrix& counts);

struct PpmiMatrix {
  std::vector<std::string> vocab;
  SymmetricMatrix matrix;
};

/// Throws RuntimeFailure for an empty corpus or fewer than 2 vocabulary words.
PpmiMatrix build_ppmi(const SentenceTokens& sentences, std::size_t window, std::size_t max_vocab);

struct SignalSpectrum {
  std::vector<double> values;  // non-increasing, non-negative
  std::string kind = "ppmi";
};

/// Singular values (absolute eigenvalues) of a symmetric matrix, largest
/// first. Throws RuntimeFailure on non-finite entries.
SignalSpectrum estimate_spectrum(const SymmetricMatrix& matrix);

struct NoiseEstimate {
  double sigma = 0;
  std::string method = "split-half";
};

/// ||A - B||_F / (2 sqrt(n^2)).
double half_difference_sigma(const SymmetricMatrix& a, const SymmetricMatrix& b);

/// Splits the sentences into two seeded random halves, builds the PPMI of
/// each over the vocabulary of the whole corpus and compares them. Throws
/// RuntimeFailure with fewer than 2 sentences.
NoiseEstimate estimate_sigma(const SentenceTokens& sentences, std::size_t window,
                             std::size_t max_vocab, std::uint64_t seed);

/// Per-dimension bias/variance estimate of the PIP loss E||E E^T - Ê Ê^T||
/// for an embedding E = U D^alpha of a signal matrix with the given
/// spectrum, observed with i.i.d. noise of deviation sigma:
///
///   bias(k)  = sqrt(sum_{i>k} l_i^{4a})
///   var1(k)  = 2 sqrt(2n) a sigma sqrt(sum_{i<=k} l_i^{4a-2})
///   var2(k)  = sqrt(2) sigma sum_{i<=k} (l_i^{2a} - l_{i+1}^{2a}) sqrt(G_i)
///   G_i      = sum_{r<=i<s} (l_r - l_s)^-2
///
/// Index k runs over 1..d (stored 0-based).
struct PipLossCurve {
  double alpha = 0.5;
  double sigma = 0;
  std::size_t n = 0;
  std::vector<double> bias, variance1, variance2, total;
  std::size_t k_star = 0;
  /// (r, s) pairs with |l_r - l_s| < 1e-12 left out of the G_i sums.
  std::size_t degenerate_gaps = 0;

  std::size_t size() const { return total.size(); }
  double loss_at(std::size_t k) const { return total[k - 1]; }
};

/// G_i for i = 1..d, one OpenMP task per i.
std::vector<double> gap_sums(std::span<const double> spectrum, std::size_t* degenerate = nullptr);

namespace serial {
std::vector<double> gap_sums(std::span<const double> spectrum, std::size_t* degenerate = nullptr);
}  // namespace serial

/// Throws ConfigError unless 0 <= alpha <= 1 and sigma >= 0; RuntimeFailure
/// for an empty or increasing spectrum. k_star ties go to the smaller k.
PipLossCurve pip_loss_curve(const SignalSpectrum& spectrum, double sigma, double alpha,
                            std::size_t n);

struct PipOptions {
  std::size_t window = 5;
  std::size_t max_vocab = 2000;
  std::uint64_t seed = 1;
  std::vector<double> alphas{0.5, 1.0};
};

struct CorpusPip {
  std::size_t side = 0;
  SignalSpectrum spectrum;
  NoiseEstimate noise;
  std::vector<PipLossCurve> curves;  // one per alpha
};

struct CorpusComparison {
  PipOptions options;
  CorpusPip basic, infused;

  long delta_k(std::size_t alpha_index) const;
  /// |loss_infused(k*) - loss_basic(k*)| / loss_basic(k*).
  double relative_loss_change(std::size_t alpha_index) const;
};

CorpusPip analyse_corpus(const SentenceTokens& sentences, const PipOptions& options);

/// Estimates both corpora independently (no vocabulary alignment).
CorpusComparison compare_corpora(const SentenceTokens& basic, const SentenceTokens& infused,
                                 const PipOptions& options);

/// Per corpus and alpha: `k,bias,variance1,variance2,total` rows followed by
/// `k_star,loss_at_k_star`; then a comparison block.
std::string format_comparison(const CorpusComparison& comparison);

}  // namespace semno
