// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "semno/artifact.hpp"
#include "semno/embed.hpp"
#include "semno/error.hpp"
#include "semno/evaluate.hpp"
#include "semno/filter.hpp"
#include "semno/graph.hpp"
#include "semno/hierarchy.hpp"
#include "semno/infuse.hpp"
#include "semno/louvain.hpp"
#include "semno/pipdim.hpp"
#include "semno/pipeline.hpp"
#include "semno/rng.hpp"
#include "test_util.hpp"

using namespace semno;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kModularityTol = 1e-12;
constexpr double kOptimumTol = 1e-9;
constexpr int kLouvainGraphs = 100;
constexpr int kLouvainRequired = 95;
constexpr double kMinPrecision = 0.90;
constexpr double kMinRecall = 0.80;
constexpr double kMinOverlap = 0.50;
constexpr long kMaxDeltaK = 3;
constexpr double kMaxRelativeLoss = 0.10;
constexpr double kGradientTol = 1e-4;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail.clear();
    if (!detail.empty()) detail += "; ";
    pass = false;
    detail += what;
  }
};

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_seconds) {
    o.require(false, "runtime " + fmt(secs) + " s over budget " + fmt(budget_seconds) + " s");
  }
  failures += !o.pass;
  std::printf("%s criterion %2d  %-34s %8.2f s  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs,
              o.detail.c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------

Outcome infusion() {
  Outcome o;
  const std::map<std::size_t, std::size_t> table = {{1, 0},  {2, 1},  {3, 1}, {4, 1}, {8, 2},
                                                    {10, 2}, {16, 2}, {17, 3}, {1024, 5}};
  for (const auto& [len, expected] : table) {
    const auto by_log = static_cast<std::size_t>(std::ceil(std::log2(static_cast<long double>(len)) / 2.0L));
    o.require(infusion_frequency(len) == expected && by_log == expected,
              "I_freq(" + std::to_string(len) + ") = " + std::to_string(infusion_frequency(len)));
  }
  Rng rng(2024);
  std::size_t bad = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t len = 1 + uniform_below(rng, 60);
    CleanSentence s{"d", std::size_t(t), ClassLabel("Seat Belts"), {}};
    for (std::size_t i = 0; i < len; ++i) s.tokens.push_back("w" + std::to_string(uniform_below(rng, 30)));
    const InfusedSentence out = infuse_sentence(s, rng);
    const auto count = std::count_if(out.tokens.begin(), out.tokens.end(),
                                     [](const std::string& w) { return is_anchor(w); });
    bool ok = std::size_t(count) == infusion_frequency(len) &&
              out.tokens.size() == len + std::size_t(count) && strip_anchors(out) == s;
    for (std::size_t i = 0; i + 1 < out.tokens.size(); ++i) {
      if (is_anchor(out.tokens[i]) && is_anchor(out.tokens[i + 1])) ok = false;
    }
    for (std::size_t i = 1; i < out.anchor_positions.size(); ++i) {
      if (out.anchor_positions[i] < out.anchor_positions[i - 1] + 2) ok = false;
    }
    bad += !ok;
  }
  o.require(bad == 0, std::to_string(bad) + " of 10000 random sentences violate the property");
  if (o.pass) o.detail = "9 table rows, 10000 random sentences";
  return o;
}

Outcome modularity_oracle() {
  Outcome o;
  Rng rng(1977);
  int optimal = 0;
  double worst_eval = 0;
  for (int t = 0; t < kLouvainGraphs; ++t) {
    const std::size_t n = 2 + uniform_below(rng, 7);
    const auto d = oracle::random_dense(rng, n, 0.3 + 0.6 * uniform01(rng));
    const auto edges = oracle::edges_of(d);
    const WeightedGraph g(n, edges);
    for (int p = 0; p < 5; ++p) {
      std::vector<std::uint32_t> part(n);
      for (auto& c : part) c = static_cast<std::uint32_t>(uniform_below(rng, n));
      worst_eval = std::max(worst_eval, std::abs(modularity(g, part) - oracle::modularity(d, part)));
    }
    const auto r = louvain(g, static_cast<std::uint64_t>(t));
    worst_eval = std::max(worst_eval, std::abs(modularity(g, r.community) - oracle::modularity(d, r.community)));
    optimal += std::abs(r.modularity - oracle::best_modularity(d)) <= kOptimumTol;
  }
  o.require(worst_eval <= kModularityTol, "modularity differs from brute force by " + fmt(worst_eval));
  o.require(optimal >= kLouvainRequired,
            "louvain optimal on " + std::to_string(optimal) + "/" + std::to_string(kLouvainGraphs));
  if (o.pass) {
    o.detail = "max |dQ| " + fmt(worst_eval) + ", optimum on " + std::to_string(optimal) + "/" +
               std::to_string(kLouvainGraphs);
  }
  return o;
}

Outcome graph_exactness() {
  Outcome o;
  Rng rng(303);
  std::size_t edges = 0;
  for (int t = 0; t < 25; ++t) {
    EmbeddingModel m;
    m.dim = 2 + uniform_below(rng, 12);
    const std::size_t words = 2 + uniform_below(rng, 199);
    for (std::size_t i = 0; i < words; ++i) {
      m.words.push_back("w" + std::to_string(i));
      for (std::size_t d = 0; d < m.dim; ++d) {
        m.vectors.push_back(static_cast<float>(standard_normal(rng) + (i % 4 == d % 4 ? 2.0 : 0.0)));
      }
    }
    const double theta = 0.05 + 0.9 * uniform01(rng);
    const auto got = build_graph(m, theta).edges;
    const auto want = oracle::all_pairs_edges(m, theta);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = got[i].a == want[i].a && got[i].b == want[i].b && got[i].weight == want[i].weight;
    }
    o.require(same, "fixture " + std::to_string(t) + " differs from the all-pairs oracle");
    edges += want.size();
  }
  // cos((3,4),(5,0)) = 0.6 exactly.
  EmbeddingModel b;
  b.dim = 2;
  b.words = {"u", "v"};
  b.vectors = {3, 4, 5, 0};
  o.require(build_graph(b, 0.6).edges.empty(), "cosine equal to theta produced an edge");
  o.require(build_graph(b, 0.59).edges.size() == 1, "cosine above theta produced no edge");
  if (o.pass) o.detail = "25 fixtures, " + std::to_string(edges) + " edges, boundary excluded";
  return o;
}

// Shared state of the end-to-end criteria.
struct FullRun {
  Config config;
  bool ok = false;
};

Config synthetic_config(const fs::path& dir) {
  Config c = Config::defaults();
  c.set("workdir", dir.string());
  c.set("input", (dir / "corpus.csv").string());
  return c;
}

void run_pipeline(const Config& c) {
  RunOptions options;
  options.threads = 1;
  Pipeline p(c, options);
  for (const char* stage : {"synth", "cleanse", "infuse", "embed", "graph", "filter", "pip", "sample", "score"}) {
    p.run_stage(stage);
  }
}

Outcome end_to_end(FullRun& run) {
  Outcome o;
  run.config = synthetic_config(test_util::scratch_dir("acceptance-a"));
  const SyntheticSpec spec = synthetic_spec(run.config);
  o.require(spec.classes == 4 && spec.topic_vocabulary == 50 && spec.noise_vocabulary == 100 &&
                spec.sentences_per_class == 2000 && spec.noise_ratio == 0.3,
            "default synthetic settings changed");
  run_pipeline(run.config);
  run.ok = true;

  const auto verdicts = load_verdicts(run.config.path("verdicts"), nullptr);
  const auto truth = load_annotations(run.config.path("annotations"));
  const auto reports = score(verdicts, truth);
  o.require(reports.size() == spec.classes, std::to_string(reports.size()) + " classes scored");
  std::string detail;
  for (const auto& r : reports) {
    const double p = r.precision.value_or(-1), rc = r.recall.value_or(-1);
    o.require(p >= kMinPrecision, r.label.name() + " precision " + fmt(p));
    o.require(rc >= kMinRecall, r.label.name() + " recall " + fmt(rc));
    detail += (detail.empty() ? "" : ", ") + r.label.name() + " P=" + fmt(p, 3) + " R=" + fmt(rc, 3);
  }
  if (o.pass) o.detail = detail;
  return o;
}

Outcome anchored_communities(const FullRun& run) {
  Outcome o;
  o.require(run.ok, "end-to-end run did not complete");
  if (!o.pass) return o;
  const auto retained = load_hierarchy(run.config.path("hierarchy"), nullptr);
  const AnchoredCommunitySet set = select_anchored(retained);
  const SyntheticCorpus synthetic = generate_synthetic(synthetic_spec(run.config));
  o.require(set.size() <= retained.size(),
            "N=" + std::to_string(set.size()) + " > M=" + std::to_string(retained.size()));
  double worst = 1.0;
  for (std::size_t c = 0; c < synthetic.labels.size(); ++c) {
    const std::string anchor = anchor_surface(synthetic.labels[c]);
    const std::set<std::string> topic(synthetic.topic_words[c].begin(), synthetic.topic_words[c].end());
    bool found = false;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const auto& anchors = set.anchors[i];
      if (std::find(anchors.begin(), anchors.end(), anchor) == anchors.end()) continue;
      found = true;
      const auto& concepts = set.concepts[i];
      const auto shared = static_cast<double>(std::count_if(
          concepts.begin(), concepts.end(), [&](const std::string& w) { return topic.contains(w); }));
      // Share of the concept set drawn from the topic, and share of the topic covered.
      const double purity = concepts.empty() ? 0.0 : shared / double(concepts.size());
      const double coverage = shared / double(topic.size());
      worst = std::min({worst, purity, coverage});
      o.require(set.communities[i].level == 3, anchor + " community at level " +
                                                   std::to_string(set.communities[i].level));
      o.require(purity >= kMinOverlap && coverage >= kMinOverlap,
                anchor + " overlap purity " + fmt(purity) + " coverage " + fmt(coverage));
    }
    o.require(found, anchor + " is in no retained community");
  }
  if (o.pass) {
    o.detail = "N=" + std::to_string(set.size()) + " M=" + std::to_string(retained.size()) +
               ", min overlap " + fmt(worst, 3);
  }
  return o;
}

Outcome near_lossless(const FullRun& run) {
  Outcome o;
  o.require(run.ok, "end-to-end run did not complete");
  if (!o.pass) return o;
  // Last block of the report: alpha,k_star_basic,k_star_infused,delta_k,loss_basic,loss_infused,relative_change
  std::istringstream in(read_file(run.config.path("pip_report")));
  std::string line;
  bool in_block = false;
  std::set<double> alphas;
  while (std::getline(in, line)) {
    if (line == "# comparison") {
      in_block = true;
      std::getline(in, line);
      continue;
    }
    if (!in_block || line.empty()) continue;
    double alpha = 0, lb = 0, li = 0, rel = 0;
    long kb = 0, ki = 0, dk = 0;
    if (std::sscanf(line.c_str(), "%lf,%ld,%ld,%ld,%lf,%lf,%lf", &alpha, &kb, &ki, &dk, &lb, &li, &rel) != 7) {
      o.require(false, "unreadable comparison row '" + line + "'");
      continue;
    }
    alphas.insert(alpha);
    o.require(std::labs(ki - kb) <= kMaxDeltaK, "alpha " + fmt(alpha) + " delta k " + std::to_string(ki - kb));
    o.require(std::abs(li - lb) / lb < kMaxRelativeLoss, "alpha " + fmt(alpha) + " loss change " + fmt(rel));
    o.detail += (o.detail.empty() ? "" : ", ") + std::string("a=") + fmt(alpha, 2) + " k*" +
                std::to_string(kb) + "->" + std::to_string(ki) + " dL=" + fmt(100 * rel, 3) + "%";
  }
  o.require(alphas == std::set<double>{0.5, 1.0}, "report does not cover alpha 0.5 and 1.0");
  return o;
}

Outcome pip_internals() {
  Outcome o;
  SignalSpectrum s;
  s.values = {9, 6, 4, 2.5, 1, 0.5, 0.2, 0};
  for (double alpha : {0.25, 0.5, 1.0}) {
    const auto c = pip_loss_curve(s, 0.0, alpha, 8);
    for (std::size_t k = 1; k <= 8; ++k) {
      double tail = 0;
      for (std::size_t i = k; i < 8; ++i) tail += std::pow(s.values[i], 4 * alpha);
      o.require(c.total[k - 1] == std::sqrt(tail),
                "sigma=0 alpha " + fmt(alpha) + " k " + std::to_string(k) + " differs from bias");
      if (k > 1) o.require(c.total[k - 1] <= c.total[k - 2], "sigma=0 curve increases");
    }
  }
  SignalSpectrum gapped;
  gapped.values = {10, 9, 8, 7, 0.05, 0.04, 0.03, 0.02};
  const auto curve = pip_loss_curve(gapped, 0.2, 0.5, 8);
  const auto mc = oracle::monte_carlo_pip(gapped.values, 0.2, 0.5, 50, 1);
  auto top3 = [](const std::vector<double>& loss) {
    std::vector<std::size_t> k(loss.size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = i + 1;
    std::stable_sort(k.begin(), k.end(), [&](auto a, auto b) { return loss[a - 1] < loss[b - 1]; });
    k.resize(3);
    return k;
  };
  const auto a = top3(curve.total), b = top3(mc);
  auto show = [](const std::vector<std::size_t>& v) {
    return "(" + std::to_string(v[0]) + "," + std::to_string(v[1]) + "," + std::to_string(v[2]) + ")";
  };
  o.require(a == b, "closed form top-3 " + show(a) + " vs Monte-Carlo " + show(b));
  if (o.pass) o.detail = "sigma=0 exact for 3 alphas, top-3 k " + show(a) + " on both";
  return o;
}

Outcome filter_semantics() {
  Outcome o;
  Rng rng(808);
  std::size_t sentences = 0, mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t vocab = 5 + uniform_below(rng, 40);
    std::vector<std::vector<std::string>> concepts(1 + uniform_below(rng, 20));
    AnchoredCommunitySet set;
    for (std::size_t i = 0; i < concepts.size(); ++i) {
      for (std::size_t k = 0, n = 1 + uniform_below(rng, 8); k < n; ++k) {
        const std::string w = "t" + std::to_string(uniform_below(rng, vocab));
        if (std::find(concepts[i].begin(), concepts[i].end(), w) == concepts[i].end()) concepts[i].push_back(w);
      }
      Community c{"1-1-" + std::to_string(i + 1), 3, concepts[i]};
      c.members.push_back("A_c" + std::to_string(i));
      set.communities.push_back(c);
      set.anchors.push_back({"A_c" + std::to_string(i)});
      set.concepts.push_back(concepts[i]);
    }
    set.retained_count = set.size();
    std::vector<CleanSentence> corpus;
    for (std::size_t i = 0; i < 25; ++i) {
      CleanSentence s{"d" + std::to_string(i), 0, ClassLabel("L" + std::to_string(i % 3)), {}};
      for (std::size_t k = 0, n = uniform_below(rng, 31); k < n; ++k) {
        s.tokens.push_back("t" + std::to_string(uniform_below(rng, 2 * vocab)));
      }
      corpus.push_back(std::move(s));
    }
    const auto result = filter_corpus(corpus, set);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto want = oracle::encode_brute(corpus[i].tokens, concepts);
      const bool noise = std::all_of(want.begin(), want.end(), [](auto v) { return v == 0; });
      mismatches += result.verdicts[i].vector != want || result.verdicts[i].is_noise != noise;
      ++sentences;
    }
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " verdicts differ from the oracle");

  auto verdict = [](std::size_t i, bool noise) {
    NoiseVerdict v;
    v.doc_id = "doc";
    v.index = i;
    v.label = ClassLabel("Brakes");
    v.is_noise = noise;
    return v;
  };
  // Predicted {0,1,2,3}, annotated {2,3,4}: P = 1/2, R = 2/3, F1 = 4/7.
  std::vector<NoiseVerdict> v;
  std::vector<Annotation> a;
  for (std::size_t i = 0; i < 10; ++i) {
    v.push_back(verdict(i, i < 4));
    a.push_back({"doc", i, (i >= 2 && i <= 4) ? 1 : 0});
  }
  auto r = score(v, a).at(0);
  o.require(r.precision == 0.5 && r.recall == 2.0 / 3.0 && r.f1 == 2 * 0.5 * (2.0 / 3.0) / (0.5 + 2.0 / 3.0),
            "ten-sentence fixture");
  // Nothing predicted and nothing annotated: all three undefined.
  std::vector<NoiseVerdict> none{verdict(0, false), verdict(1, false)};
  r = score(none, std::vector<Annotation>{{"doc", 0, 0}, {"doc", 1, 0}}).at(0);
  o.require(!r.precision && !r.recall && !r.f1, "undefined metrics reported as numbers");
  // Predictions all wrong: P = R = 0, F1 undefined.
  r = score(none, std::vector<Annotation>{{"doc", 0, 1}}).at(0);
  o.require(!r.precision && r.recall == 0.0 && !r.f1, "zero-recall fixture");
  const std::string table = format_reports(ArtifactHeader{}, score(none, std::vector<Annotation>{{"doc", 0, 0}}));
  o.require(table.find("undefined,undefined,undefined") != std::string::npos, "report text for undefined");
  if (o.pass) o.detail = std::to_string(sentences) + " sentences vs oracle, 4 scoring fixtures";
  return o;
}

Outcome gradient_check() {
  Outcome o;
  Rng rng(99);
  double worst = 0;
  for (int t = 0; t < 10; ++t) {
    const std::size_t dim = 3 + uniform_below(rng, 30), neg = 1 + uniform_below(rng, 10);
    std::vector<double> v(dim), u(dim * (neg + 1)), gv(dim), gu(u.size()), sv(dim), su(u.size());
    for (auto& x : v) x = 0.5 * standard_normal(rng);
    for (auto& x : u) x = 0.5 * standard_normal(rng);
    negative_sampling_gradient<double>(v, u, gv, gu);
    const double h = 1e-6;
    auto probe = [&](std::vector<double>& x, std::size_t i, double analytic) {
      const double keep = x[i];
      x[i] = keep + h;
      const double up = negative_sampling_gradient<double>(v, u, sv, su);
      x[i] = keep - h;
      const double down = negative_sampling_gradient<double>(v, u, sv, su);
      x[i] = keep;
      const double numeric = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(numeric - analytic) /
                                  std::max(1e-3, std::abs(analytic) + std::abs(numeric)));
    };
    for (std::size_t i = 0; i < v.size(); ++i) probe(v, i, gv[i]);
    for (std::size_t i = 0; i < u.size(); ++i) probe(u, i, gu[i]);
  }
  o.require(worst < kGradientTol, "relative error " + fmt(worst));
  if (o.pass) o.detail = "10 configurations, max relative error " + fmt(worst, 3);
  return o;
}

Outcome determinism(const FullRun& first) {
  Outcome o;
  o.require(first.ok, "end-to-end run did not complete");
  if (!o.pass) return o;
  const fs::path dir_a = first.config.get("workdir");
  const fs::path dir_b = test_util::scratch_dir("acceptance-b");
  Config c = synthetic_config(dir_b);
  run_pipeline(c);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir_a)) {
    const fs::path other = dir_b / entry.path().filename();
    ++files;
    o.require(fs::exists(other) && read_file(entry.path()) == read_file(other),
              entry.path().filename().string() + " differs");
  }
  std::size_t other_files = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir_b)) ++other_files;
  o.require(files == other_files, "different artifact sets");
  if (o.pass) o.detail = std::to_string(files) + " artifacts byte-identical";
  return o;
}

}  // namespace

int main() {
  FullRun run;
  criterion(1, "infusion formula", 1, infusion);
  criterion(2, "modularity and louvain oracle", 30, modularity_oracle);
  criterion(3, "graph construction exactness", 5, graph_exactness);
  criterion(4, "end-to-end synthetic replication", 600, [&] { return end_to_end(run); });
  criterion(5, "anchored-community formation", 600, [&] { return anchored_communities(run); });
  criterion(6, "near-lossless infusion", 300, [&] { return near_lossless(run); });
  criterion(7, "pip estimator internals", 60, pip_internals);
  criterion(8, "filter and scoring semantics", 5, filter_semantics);
  criterion(9, "negative-sampling gradient", 5, gradient_check);
  criterion(10, "determinism at one thread", 1200, [&] { return determinism(run); });
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
