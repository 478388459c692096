#include "semno/pipdim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

#include <Eigen/Dense>
#include <omp.h>

#include "semno/error.hpp"
#include "semno/rng.hpp"

namespace semno {

namespace {

constexpr double kDegenerateGap = 1e-12;

std::unordered_map<std::string_view, std::uint32_t> index_of(std::span<const std::string> vocab) {
  std::unordered_map<std::string_view, std::uint32_t> ids;
  for (std::size_t i = 0; i < vocab.size(); ++i) ids.emplace(vocab[i], static_cast<std::uint32_t>(i));
  return ids;
}

std::vector<std::int64_t> encode(std::span<const std::string> sentence,
                                 const std::unordered_map<std::string_view, std::uint32_t>& ids) {
  std::vector<std::int64_t> out(sentence.size(), -1);
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const auto it = ids.find(sentence[i]);
    if (it != ids.end()) out[i] = it->second;
  }
  return out;
}

template <class Add>
void count_sentence(const std::vector<std::int64_t>& ids, std::size_t window, Add&& add) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0) continue;
    const std::size_t hi = std::min(ids.size(), i + window + 1);
    for (std::size_t j = i + 1; j < hi; ++j) {
      if (ids[j] < 0) continue;
      add(static_cast<std::size_t>(ids[i]), static_cast<std::size_t>(ids[j]));
    }
  }
}

// Sum_{r<=i<s} (l_r - l_s)^-2 for one 0-based i.
double gap_sum_at(std::span<const double> l, std::size_t i, std::size_t& degenerate) {
  double g = 0;
  for (std::size_t r = 0; r <= i; ++r) {
    for (std::size_t s = i + 1; s < l.size(); ++s) {
      const double gap = l[r] - l[s];
      if (std::abs(gap) < kDegenerateGap) {
        ++degenerate;
        continue;
      }
      g += 1.0 / (gap * gap);
    }
  }
  return g;
}

double checked_pow(double base, double exponent) {
  if (base == 0.0 && exponent < 0.0) return 0.0;  // zero-magnitude direction carries nothing
  return std::pow(base, exponent);
}

}  // namespace

std::vector<std::string> top_vocabulary(const SentenceTokens& sentences, std::size_t max_vocab) {
  std::map<std::string_view, std::uint64_t> counts;
  for (const auto& s : sentences) {
    for (const auto& t : s) ++counts[t];
  }
  std::vector<std::pair<std::string_view, std::uint64_t>> sorted(counts.begin(), counts.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (sorted.size() > max_vocab) sorted.resize(max_vocab);
  std::vector<std::string> out;
  out.reserve(sorted.size());
  for (const auto& [w, c] : sorted) out.emplace_back(w);
  return out;
}

SymmetricMatrix cooccurrence_counts(const SentenceTokens& sentences,
                                    std::span<const std::string> vocab, std::size_t window) {
  const auto ids = index_of(vocab);
  const std::size_t n = vocab.size();
  SymmetricMatrix counts(n);
  const auto total = static_cast<std::ptrdiff_t>(sentences.size());
#pragma omp parallel
  {
    std::unordered_map<std::uint64_t, double> local;
#pragma omp for schedule(dynamic, 256) nowait
    for (std::ptrdiff_t si = 0; si < total; ++si) {
      count_sentence(encode(sentences[static_cast<std::size_t>(si)], ids), window,
                     [&](std::size_t a, std::size_t b) {
                       const std::size_t lo = std::min(a, b), hi = std::max(a, b);
                       local[static_cast<std::uint64_t>(lo) * n + hi] += 1.0;
                     });
    }
#pragma omp critical(semno_cooccurrence_merge)
    for (const auto& [key, c] : local) {
      const std::size_t lo = key / n, hi = key % n;
      counts.at(lo, hi) += lo == hi ? 2.0 * c : c;
      if (lo != hi) counts.at(hi, lo) += c;
    }
  }
  return counts;
}

namespace serial {

SymmetricMatrix cooccurrence_counts(const SentenceTokens& sentences,
                                    std::span<const std::string> vocab, std::size_t window) {
  const auto ids = index_of(vocab);
  SymmetricMatrix counts(vocab.size());
  for (const auto& s : sentences) {
    count_sentence(encode(s, ids), window, [&](std::size_t a, std::size_t b) {
      counts.at(a, b) += 1.0;
      counts.at(b, a) += 1.0;
    });
  }
  return counts;
}

}  // namespace serial

SymmetricMatrix ppmi_from_counts(const SymmetricMatrix& counts) {
  const std::size_t n = counts.n;
  std::vector<double> row(n, 0.0);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[i] += counts(i, j);
    total += row[i];
  }
  SymmetricMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double c = counts(i, j);
      if (c <= 0) continue;
      const double pmi = std::log(c * total / (row[i] * row[j]));
      out.at(i, j) = pmi > 0 ? pmi : 0.0;
    }
  }
  return out;
}

PpmiMatrix build_ppmi(const SentenceTokens& sentences, std::size_t window, std::size_t max_vocab) {
  if (sentences.empty()) throw RuntimeFailure("cannot build a PPMI matrix from an empty corpus");
  PpmiMatrix out;
  out.vocab = top_vocabulary(sentences, max_vocab);
  if (out.vocab.size() < 2) {
    throw RuntimeFailure("PPMI needs at least 2 vocabulary words, found " +
                         std::to_string(out.vocab.size()));
  }
  out.matrix = ppmi_from_counts(cooccurrence_counts(sentences, out.vocab, window));
  return out;
}

SignalSpectrum estimate_spectrum(const SymmetricMatrix& matrix) {
  if (!std::all_of(matrix.values.begin(), matrix.values.end(),
                   [](double x) { return std::isfinite(x); })) {
    throw RuntimeFailure("signal matrix has non-finite entries");
  }
  const auto n = static_cast<Eigen::Index>(matrix.n);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      m(matrix.values.data(), n, n);
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw RuntimeFailure("eigen decomposition failed");
  SignalSpectrum out;
  out.values.resize(matrix.n);
  for (Eigen::Index i = 0; i < n; ++i) out.values[static_cast<std::size_t>(i)] = std::abs(solver.eigenvalues()(i));
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

double half_difference_sigma(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.n != b.n) throw RuntimeFailure("matrices differ in size");
  if (a.n == 0) return 0.0;
  double sq = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    sq += d * d;
  }
  return std::sqrt(sq) / (2.0 * std::sqrt(static_cast<double>(a.values.size())));
}

NoiseEstimate estimate_sigma(const SentenceTokens& sentences, std::size_t window,
                             std::size_t max_vocab, std::uint64_t seed) {
  if (sentences.size() < 2) {
    throw RuntimeFailure("noise estimation needs at least 2 sentences to split");
  }
  const auto vocab = top_vocabulary(sentences, max_vocab);
  std::vector<std::size_t> order(sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_below(rng, i)]);
  SentenceTokens first, second;
  const std::size_t half = order.size() / 2;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < half ? first : second).push_back(sentences[order[i]]);
  }
  const auto m1 = ppmi_from_counts(cooccurrence_counts(first, vocab, window));
  const auto m2 = ppmi_from_counts(cooccurrence_counts(second, vocab, window));
  return NoiseEstimate{half_difference_sigma(m1, m2), "split-half"};
}

std::vector<double> gap_sums(std::span<const double> spectrum, std::size_t* degenerate) {
  const auto d = static_cast<std::ptrdiff_t>(spectrum.size());
  std::vector<double> g(spectrum.size(), 0.0);
  std::size_t skipped = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : skipped)
  for (std::ptrdiff_t i = 0; i < d; ++i) {
    std::size_t local = 0;
    g[static_cast<std::size_t>(i)] = gap_sum_at(spectrum, static_cast<std::size_t>(i), local);
    skipped += local;
  }
  if (degenerate) *degenerate = skipped;
  return g;
}

namespace serial {

std::vector<double> gap_sums(std::span<const double> spectrum, std::size_t* degenerate) {
  std::vector<double> g(spectrum.size(), 0.0);
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) g[i] = gap_sum_at(spectrum, i, skipped);
  if (degenerate) *degenerate = skipped;
  return g;
}

}  // namespace serial

PipLossCurve pip_loss_curve(const SignalSpectrum& spectrum, double sigma, double alpha,
                            std::size_t n) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be non-negative");
  const auto& l = spectrum.values;
  const std::size_t d = l.size();
  if (d == 0) throw RuntimeFailure("empty spectrum");
  for (std::size_t i = 0; i + 1 < d; ++i) {
    if (l[i] < l[i + 1] || l[i + 1] < 0) throw RuntimeFailure("spectrum must be non-increasing and non-negative");
  }

  PipLossCurve c;
  c.alpha = alpha;
  c.sigma = sigma;
  c.n = n;
  c.bias.assign(d, 0.0);
  c.variance1.assign(d, 0.0);
  c.variance2.assign(d, 0.0);
  c.total.assign(d, 0.0);

  // bias(k) uses the tail i > k; suffix[k] = sum_{i >= k} (0-based).
  std::vector<double> suffix(d + 1, 0.0);
  for (std::size_t i = d; i-- > 0;) suffix[i] = suffix[i + 1] + checked_pow(l[i], 4 * alpha);

  std::vector<double> g;
  if (sigma > 0) g = gap_sums(l, &c.degenerate_gaps);

  const double v1_scale = 2.0 * std::sqrt(2.0 * static_cast<double>(n)) * alpha * sigma;
  double head = 0, v2 = 0;
  for (std::size_t k = 1; k <= d; ++k) {
    const std::size_t i = k - 1;
    head += checked_pow(l[i], 4 * alpha - 2);
    if (sigma > 0) {
      const double next = i + 1 < d ? checked_pow(l[i + 1], 2 * alpha) : 0.0;
      v2 += (checked_pow(l[i], 2 * alpha) - next) * std::sqrt(g[i]);
    }
    c.bias[i] = std::sqrt(suffix[k]);
    c.variance1[i] = v1_scale * std::sqrt(head);
    c.variance2[i] = std::sqrt(2.0) * sigma * v2;
    c.total[i] = c.bias[i] + c.variance1[i] + c.variance2[i];
  }
  c.k_star = 1;
  for (std::size_t k = 2; k <= d; ++k) {
    if (c.total[k - 1] < c.total[c.k_star - 1]) c.k_star = k;
  }
  return c;
}

long CorpusComparison::delta_k(std::size_t alpha_index) const {
  return static_cast<long>(infused.curves[alpha_index].k_star) -
         static_cast<long>(basic.curves[alpha_index].k_star);
}

double CorpusComparison::relative_loss_change(std::size_t alpha_index) const {
  const auto& b = basic.curves[alpha_index];
  const auto& i = infused.curves[alpha_index];
  const double lb = b.loss_at(b.k_star);
  const double li = i.loss_at(i.k_star);
  return lb > 0 ? std::abs(li - lb) / lb : (li == 0 ? 0.0 : INFINITY);
}

CorpusPip analyse_corpus(const SentenceTokens& sentences, const PipOptions& options) {
  CorpusPip out;
  const PpmiMatrix ppmi = build_ppmi(sentences, options.window, options.max_vocab);
  out.side = ppmi.matrix.n;
  out.spectrum = estimate_spectrum(ppmi.matrix);
  out.noise = estimate_sigma(sentences, options.window, options.max_vocab, options.seed);
  for (double alpha : options.alphas) {
    out.curves.push_back(pip_loss_curve(out.spectrum, out.noise.sigma, alpha, out.side));
  }
  return out;
}

CorpusComparison compare_corpora(const SentenceTokens& basic, const SentenceTokens& infused,
                                 const PipOptions& options) {
  CorpusComparison out;
  out.options = options;
  out.basic = analyse_corpus(basic, options);
  out.infused = analyse_corpus(infused, options);
  return out;
}

std::string format_comparison(const CorpusComparison& comparison) {
  std::string out;
  char buf[160];
  auto block = [&](const char* name, const CorpusPip& pip) {
    for (const auto& c : pip.curves) {
      std::snprintf(buf, sizeof buf, "# corpus=%s alpha=%.3g sigma=%.9g n=%zu degenerate_gaps=%zu\n",
                    name, c.alpha, c.sigma, c.n, c.degenerate_gaps);
      out += buf;
      out += "k,bias,variance1,variance2,total\n";
      for (std::size_t k = 1; k <= c.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g,%.9g\n", k, c.bias[k - 1],
                      c.variance1[k - 1], c.variance2[k - 1], c.total[k - 1]);
        out += buf;
      }
      out += "k_star,loss_at_k_star\n";
      std::snprintf(buf, sizeof buf, "%zu,%.9g\n", c.k_star, c.loss_at(c.k_star));
      out += buf;
    }
  };
  block("basic", comparison.basic);
  block("infused", comparison.infused);
  out += "# comparison\nalpha,k_star_basic,k_star_infused,delta_k,loss_basic,loss_infused,relative_change\n";
  for (std::size_t a = 0; a < comparison.options.alphas.size(); ++a) {
    const auto& b = comparison.basic.curves[a];
    const auto& i = comparison.infused.curves[a];
    std::snprintf(buf, sizeof buf, "%.3g,%zu,%zu,%ld,%.9g,%.9g,%.6f\n", b.alpha, b.k_star, i.k_star,
                  comparison.delta_k(a), b.loss_at(b.k_star), i.loss_at(i.k_star),
                  comparison.relative_loss_change(a));
    out += buf;
  }
  return out;
}

}  // namespace semno
