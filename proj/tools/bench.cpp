// Wall-clock comparison of the OpenMP kernels against their serial references.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "semno/cleanse.hpp"
#include "semno/embed.hpp"
#include "semno/evaluate.hpp"
#include "semno/filter.hpp"
#include "semno/graph.hpp"
#include "semno/infuse.hpp"
#include "semno/pipdim.hpp"
#include "semno/rng.hpp"

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* kernel, double serial, double parallel) {
  std::printf("%-22s serial %9.4fs  parallel %9.4fs  speedup %5.2fx\n", kernel, serial, parallel,
              serial / parallel);
}

semno::EmbeddingModel random_model(std::size_t words, std::size_t dim, std::uint64_t seed) {
  semno::EmbeddingModel m;
  m.dim = dim;
  semno::Rng rng(seed);
  for (std::size_t i = 0; i < words; ++i) m.words.push_back("w" + std::to_string(i));
  m.vectors.resize(words * dim);
  for (auto& x : m.vectors) x = static_cast<float>(semno::standard_normal(rng));
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
  std::printf("threads: %d\n", omp_get_max_threads());

  const auto model = random_model(3000, 100, 1);
  report("build_graph", time_best_of(reps, [&] { semno::serial::build_graph(model, 0.3); }),
         time_best_of(reps, [&] { semno::build_graph(model, 0.3); }));

  semno::SyntheticSpec spec;
  spec.sentences_per_class = 2000;
  const auto synth = semno::generate_synthetic(spec);
  const auto stops = semno::load_stopwords("english");
  const auto sentences = semno::clean_corpus(synth.corpus, stops);

  semno::AnchoredCommunitySet set;
  semno::Rng rng(2);
  for (std::size_t c = 0; c < 20; ++c) {
    semno::Community comm{std::to_string(c + 1), 1, {}};
    std::vector<std::string> concepts;
    const auto& topic = synth.topic_words[c % synth.topic_words.size()];
    for (int i = 0; i < 10; ++i) concepts.push_back(topic[semno::uniform_below(rng, topic.size())]);
    set.communities.push_back(comm);
    set.concepts.push_back(concepts);
    set.anchors.push_back({"A_x"});
  }
  set.retained_count = set.communities.size();
  report("filter_corpus", time_best_of(reps, [&] { semno::serial::filter_corpus(sentences, set); }),
         time_best_of(reps, [&] { semno::filter_corpus(sentences, set); }));

  const auto views = semno::token_views(sentences);
  const auto vocab = semno::top_vocabulary(views, 2000);
  report("cooccurrence_counts",
         time_best_of(reps, [&] { semno::serial::cooccurrence_counts(views, vocab, 5); }),
         time_best_of(reps, [&] { semno::cooccurrence_counts(views, vocab, 5); }));

  std::vector<double> spectrum(400);
  for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] = 100.0 / double(i + 1);
  report("gap_sums", time_best_of(reps, [&] { semno::serial::gap_sums(spectrum); }),
         time_best_of(reps, [&] { semno::gap_sums(spectrum); }));

  const auto infused = semno::infuse_corpus(sentences, 3);
  const auto infused_views = semno::token_views(infused);
  semno::TrainConfig tc;
  tc.dim = 50;
  tc.epochs = 2;
  tc.threads = 1;
  const double serial_train = time_best_of(1, [&] { semno::train(infused_views, tc); });
  tc.threads = omp_get_max_threads();
  report("train", serial_train, time_best_of(1, [&] { semno::train(infused_views, tc); }));
  return 0;
}
