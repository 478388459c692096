#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "semno/error.hpp"
#include "semno/pipdim.hpp"
#include "semno/rng.hpp"

using namespace semno;

namespace {

using Sentences = std::vector<std::vector<std::string>>;

SentenceTokens views(const Sentences& s) {
  SentenceTokens out;
  for (const auto& x : s) out.emplace_back(x);
  return out;
}

SignalSpectrum spectrum(std::vector<double> v) {
  SignalSpectrum s;
  s.values = std::move(v);
  return s;
}

std::vector<std::size_t> ranking(const std::vector<double>& loss) {
  std::vector<std::size_t> order(loss.size());
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return loss[a - 1] < loss[b - 1]; });
  return order;
}

Sentences random_corpus(Rng& rng, std::size_t sentences, std::size_t vocab) {
  Sentences out;
  for (std::size_t i = 0; i < sentences; ++i) {
    std::vector<std::string> s;
    const std::size_t topic = uniform_below(rng, 3);
    for (std::size_t k = 0, n = 3 + uniform_below(rng, 8); k < n; ++k) {
      s.push_back("w" + std::to_string(topic * vocab + uniform_below(rng, vocab)));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("co-occurrence counts: window, symmetry, and serial equals parallel") {
  const Sentences s = {{"a", "b", "c"}, {"a", "b"}, {"c"}};
  const std::vector<std::string> vocab{"a", "b", "c"};
  const auto w1 = cooccurrence_counts(views(s), vocab, 1);
  CHECK(w1(0, 1) == 2);
  CHECK(w1(1, 0) == 2);
  CHECK(w1(1, 2) == 1);
  CHECK(w1(0, 2) == 0);
  CHECK(cooccurrence_counts(views(s), vocab, 2)(0, 2) == 1);

  Rng rng(3);
  const Sentences big = random_corpus(rng, 3000, 30);
  const auto vb = top_vocabulary(views(big), 50);
  CHECK(vb.size() == 50);
  CHECK(cooccurrence_counts(views(big), vb, 4).values ==
        serial::cooccurrence_counts(views(big), vb, 4).values);
}

TEST_CASE("PPMI: positive association, independence and errors") {
  const auto p = build_ppmi(views({{"x", "y"}, {"x", "y"}, {"u", "v"}}), 1, 10);
  const auto ix = std::find(p.vocab.begin(), p.vocab.end(), "x") - p.vocab.begin();
  const auto iy = std::find(p.vocab.begin(), p.vocab.end(), "y") - p.vocab.begin();
  CHECK(p.matrix(ix, iy) > 0);
  CHECK(p.matrix(ix, iy) == p.matrix(iy, ix));

  // Counts equal to the product of marginals: every PMI is log 1 = 0.
  SymmetricMatrix counts(2);
  counts.at(0, 0) = 1;
  counts.at(0, 1) = counts.at(1, 0) = 1;
  counts.at(1, 1) = 1;
  const auto independent = ppmi_from_counts(counts);
  for (double v : independent.values) CHECK(v == doctest::Approx(0.0));

  CHECK_THROWS_AS(build_ppmi(views({}), 2, 10), RuntimeFailure);
  CHECK_THROWS_AS(build_ppmi(views({{"only"}}), 2, 10), RuntimeFailure);
  Rng rng(1);
  const auto r = build_ppmi(views(random_corpus(rng, 500, 10)), 3, 100);
  for (double v : r.matrix.values) CHECK(v >= 0.0);
}

TEST_CASE("spectrum of simple matrices") {
  SymmetricMatrix id(3);
  for (std::size_t i = 0; i < 3; ++i) id.at(i, i) = 1;
  CHECK(estimate_spectrum(id).values == std::vector<double>{1, 1, 1});
  SymmetricMatrix d(3);
  d.at(0, 0) = 1, d.at(1, 1) = 3, d.at(2, 2) = -2;
  const auto s = estimate_spectrum(d).values;
  CHECK(s[0] == doctest::Approx(3));
  CHECK(s[1] == doctest::Approx(2));
  CHECK(s[2] == doctest::Approx(1));
  d.at(0, 0) = NAN;
  CHECK_THROWS_AS(estimate_spectrum(d), RuntimeFailure);
}

TEST_CASE("spectrum matches an independent Jacobi decomposition on random 8x8 matrices") {
  Rng rng(88);
  for (int t = 0; t < 20; ++t) {
    SymmetricMatrix m(8);
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = i; j < 8; ++j) m.at(i, j) = m.at(j, i) = standard_normal(rng);
    }
    auto ref = oracle::jacobi_eigenvalues(m.values, 8);
    for (auto& v : ref) v = std::abs(v);
    std::sort(ref.rbegin(), ref.rend());
    const auto got = estimate_spectrum(m).values;
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-8);
  }
}

TEST_CASE("split-half sigma") {
  SymmetricMatrix a(4);
  CHECK(half_difference_sigma(a, a) == 0.0);
  const Sentences same(10, std::vector<std::string>{"p", "q", "r", "p"});
  CHECK(estimate_sigma(views(same), 2, 10, 5).sigma == doctest::Approx(0.0));
  CHECK_THROWS_AS(estimate_sigma(views({{"p", "q"}}), 2, 10, 5), RuntimeFailure);

  // Two noisy copies of one matrix with entry noise s: the estimate targets s / sqrt(2).
  Rng rng(21);
  const double s = 0.3;
  double mean = 0;
  for (int t = 0; t < 20; ++t) {
    SymmetricMatrix m1(30), m2(30);
    for (std::size_t i = 0; i < 30; ++i) {
      for (std::size_t j = i; j < 30; ++j) {
        const double base = standard_normal(rng);
        const double n1 = s * standard_normal(rng), n2 = s * standard_normal(rng);
        m1.at(i, j) = m1.at(j, i) = base + n1;
        m2.at(i, j) = m2.at(j, i) = base + n2;
      }
    }
    mean += half_difference_sigma(m1, m2) / 20;
  }
  CHECK(std::abs(mean - s / std::sqrt(2.0)) < 0.25 * s / std::sqrt(2.0));

  Rng crng(4);
  const Sentences corpus = random_corpus(crng, 400, 10);
  CHECK(estimate_sigma(views(corpus), 3, 50, 9).sigma == estimate_sigma(views(corpus), 3, 50, 9).sigma);
}

TEST_CASE("sigma = 0 gives the pure truncation bias") {
  const std::vector<double> l{5, 4, 2, 1, 0.5, 0};
  for (double alpha : {0.0, 0.5, 1.0}) {
    const auto c = pip_loss_curve(spectrum(l), 0.0, alpha, 6);
    for (std::size_t k = 1; k <= l.size(); ++k) {
      double tail = 0;
      for (std::size_t i = k; i < l.size(); ++i) tail += std::pow(l[i], 4 * alpha);
      if (alpha == 0.0) {
        tail = 0;
        for (std::size_t i = k; i < l.size(); ++i) tail += 1.0;
      }
      CHECK(c.total[k - 1] == std::sqrt(tail));
      CHECK(c.variance1[k - 1] == 0.0);
      CHECK(c.variance2[k - 1] == 0.0);
      if (k > 1) CHECK(c.total[k - 1] <= c.total[k - 2]);
    }
  }
  CHECK(pip_loss_curve(spectrum(l), 0.0, 0.5, 6).k_star == 5);
  CHECK(pip_loss_curve(spectrum({3, 2, 1}), 0.0, 1.0, 3).k_star == 3);
}

TEST_CASE("bias falls, variance rises, and scaling follows c^(2 alpha)") {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> l(12);
    for (auto& v : l) v = 0.1 + 10 * uniform01(rng);
    std::sort(l.rbegin(), l.rend());
    const double alpha = uniform01(rng);
    const auto c = pip_loss_curve(spectrum(l), 0.05 + uniform01(rng), alpha, 12);
    for (std::size_t k = 1; k < l.size(); ++k) {
      CHECK(c.bias[k] <= c.bias[k - 1]);
      CHECK(c.variance1[k] >= c.variance1[k - 1]);
      CHECK(c.variance2[k] >= c.variance2[k - 1]);
    }
    for (double v : c.total) CHECK((std::isfinite(v) && v >= 0));
    CHECK((c.k_star >= 1 && c.k_star <= l.size()));

    const double scale = 3.0;
    auto scaled = l;
    for (auto& v : scaled) v *= scale;
    const auto a = pip_loss_curve(spectrum(l), 0.0, alpha, 12);
    const auto b = pip_loss_curve(spectrum(scaled), 0.0, alpha, 12);
    for (std::size_t k = 0; k < l.size(); ++k) {
      CHECK(b.total[k] == doctest::Approx(a.total[k] * std::pow(scale, 2 * alpha)).epsilon(1e-12));
    }
  }
}

TEST_CASE("a flat tail under moderate noise favours a small k") {
  std::vector<double> l(50, 1.0);
  l[0] = 10.0;
  const auto c = pip_loss_curve(spectrum(l), 0.5, 0.5, 50);
  CHECK(c.k_star <= 2);
  CHECK(c.degenerate_gaps > 0);
}

TEST_CASE("gap sums: direct evaluation, degenerate gaps, serial equals parallel") {
  const std::vector<double> l{4, 2, 1};
  std::size_t degenerate = 0;
  const auto g = gap_sums(l, &degenerate);
  CHECK(degenerate == 0);
  CHECK(g[0] == doctest::Approx(1.0 / 4 + 1.0 / 9));
  CHECK(g[1] == doctest::Approx(1.0 / 9 + 1.0 / 1));
  CHECK(g[2] == 0.0);
  const std::vector<double> tie{3, 3, 1};
  gap_sums(tie, &degenerate);
  CHECK(degenerate == 1);

  std::vector<double> big(300);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = 50.0 / double(1 + i % 150 + i / 150 * 151);
  std::sort(big.rbegin(), big.rend());
  CHECK(gap_sums(big) == serial::gap_sums(big));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(pip_loss_curve(spectrum({1}), 0.1, 1.5, 1), ConfigError);
  CHECK_THROWS_AS(pip_loss_curve(spectrum({1}), -1, 0.5, 1), ConfigError);
  CHECK_THROWS_AS(pip_loss_curve(spectrum({1, 2}), 0.1, 0.5, 2), RuntimeFailure);
  CHECK_THROWS_AS(pip_loss_curve(spectrum({}), 0.1, 0.5, 2), RuntimeFailure);
}

TEST_CASE("Monte-Carlo PIP loss ranks the top three k like the closed form") {
  const std::vector<double> l{10, 9, 8, 7, 0.05, 0.04, 0.03, 0.02};
  const auto c = pip_loss_curve(spectrum(l), 0.2, 0.5, 8);
  const auto mc = oracle::monte_carlo_pip(l, 0.2, 0.5, 50, 1);
  const auto a = ranking(c.total), b = ranking(mc);
  CHECK(std::vector<std::size_t>(a.begin(), a.begin() + 3) ==
        std::vector<std::size_t>(b.begin(), b.begin() + 3));
  // At sigma = 0 the simulation is exact.
  const auto exact = oracle::monte_carlo_pip(l, 0.0, 0.5, 1, 1);
  const auto c0 = pip_loss_curve(spectrum(l), 0.0, 0.5, 8);
  for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(exact[k] - c0.total[k]) < 1e-9);
}

TEST_CASE("identical corpora compare with zero shift") {
  Rng rng(6);
  const Sentences corpus = random_corpus(rng, 600, 12);
  PipOptions o;
  o.max_vocab = 40;
  const auto cmp = compare_corpora(views(corpus), views(corpus), o);
  for (std::size_t a = 0; a < o.alphas.size(); ++a) {
    CHECK(cmp.delta_k(a) == 0);
    CHECK(cmp.relative_loss_change(a) == 0.0);
  }
  const std::string report = format_comparison(cmp);
  CHECK(report.find("k,bias,variance1,variance2,total") != std::string::npos);
  CHECK(report.find("k_star,loss_at_k_star") != std::string::npos);
}
