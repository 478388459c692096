#include "semno/embed.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include <omp.h>

#include "semno/error.hpp"
#include "semno/infuse.hpp"
#include "semno/rng.hpp"

namespace semno {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Sampler {
  std::vector<double> cdf;

  explicit Sampler(const Vocabulary& vocab) : cdf(vocab.size()) {
    double acc = 0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      acc += std::pow(static_cast<double>(vocab.count(i)), 0.75);
      cdf[i] = acc;
    }
    for (double& c : cdf) c /= acc;
  }

  std::size_t draw(Rng& rng) const {
    const double u = uniform01(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
  }
};

struct Trainer {
  const TrainConfig& config;
  const std::vector<std::vector<std::uint32_t>>& corpus;
  const Sampler& sampler;
  const std::vector<double>& keep_prob;
  std::vector<float>& syn0;
  std::vector<float>& syn1;
  double total_steps;

  struct Scratch {
    std::vector<float> outputs, output_grads, center_grad;
    std::vector<std::uint32_t> rows, kept;
  };

  double rate(std::uint64_t processed) const {
    const double frac = 1.0 - static_cast<double>(processed) / (total_steps + 1.0);
    return config.learning_rate * std::max(frac, 1e-4);
  }

  // Trains on sentences [begin, end). `processed` counts words across all
  // workers for the learning-rate schedule.
  void run(std::size_t begin, std::size_t end, Rng& rng, std::atomic<std::uint64_t>& processed,
           double& loss, std::uint64_t& pairs) const {
    const std::size_t dim = config.dim;
    Scratch s;
    s.center_grad.resize(dim);
    for (std::size_t si = begin; si < end; ++si) {
      const auto& sentence = corpus[si];
      const double lr = static_cast<float>(rate(processed.load(std::memory_order_relaxed)));
      processed.fetch_add(sentence.size(), std::memory_order_relaxed);

      s.kept.clear();
      for (std::uint32_t w : sentence) {
        if (keep_prob[w] >= 1.0 || uniform01(rng) < keep_prob[w]) s.kept.push_back(w);
      }
      const std::size_t n = s.kept.size();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t reach = 1 + uniform_below(rng, config.window);
        const std::size_t lo = i >= reach ? i - reach : 0;
        const std::size_t hi = std::min(n - 1, i + reach);
        const std::uint32_t center = s.kept[i];
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const std::uint32_t context = s.kept[j];
          s.rows.clear();
          s.rows.push_back(context);
          for (std::size_t k = 0; k < config.negatives; ++k) {
            const auto neg = static_cast<std::uint32_t>(sampler.draw(rng));
            if (neg != context) s.rows.push_back(neg);
          }
          s.outputs.resize(s.rows.size() * dim);
          s.output_grads.resize(s.rows.size() * dim);
          for (std::size_t r = 0; r < s.rows.size(); ++r) {
            std::copy_n(syn1.data() + s.rows[r] * dim, dim, s.outputs.data() + r * dim);
          }
          float* v = syn0.data() + std::size_t{center} * dim;
          loss += negative_sampling_gradient<float>(std::span<const float>(v, dim), s.outputs,
                                                    s.center_grad, s.output_grads);
          ++pairs;
          const auto step = static_cast<float>(lr);
          for (std::size_t r = 0; r < s.rows.size(); ++r) {
            float* u = syn1.data() + std::size_t{s.rows[r]} * dim;
            const float* g = s.output_grads.data() + r * dim;
            for (std::size_t d = 0; d < dim; ++d) u[d] -= step * g[d];
          }
          for (std::size_t d = 0; d < dim; ++d) v[d] -= step * s.center_grad[d];
        }
      }
    }
  }
};

}  // namespace

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("training: ") + what + " must be positive");
  };
  require(dim > 0, "dim");
  require(window > 0, "window");
  require(negatives > 0, "negatives");
  require(epochs > 0, "epochs");
  require(learning_rate > 0 && std::isfinite(learning_rate), "learning rate");
  require(subsample > 0, "subsample threshold");
  require(min_count > 0, "min_count");
  require(threads > 0, "threads");
}

std::vector<std::pair<std::string, std::string>> TrainConfig::describe() const {
  return {{"dim", std::to_string(dim)},
          {"window", std::to_string(window)},
          {"negatives", std::to_string(negatives)},
          {"epochs", std::to_string(epochs)},
          {"learning_rate", format_double(learning_rate)},
          {"subsample", format_double(subsample)},
          {"min_count", std::to_string(min_count)},
          {"train_seed", std::to_string(seed)}};
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts)
    : words_(std::move(words)), counts_(std::move(counts)) {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    ids_.emplace(words_[i], i);
    total_ += counts_[i];
  }
}

std::optional<std::size_t> Vocabulary::find(std::string_view word) const {
  const auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocab(const SentenceTokens& sentences, std::size_t min_count) {
  std::map<std::string, std::uint64_t, std::less<>> counts;
  std::uint64_t total = 0;
  for (const auto& s : sentences) {
    for (const auto& t : s) {
      auto it = counts.find(t);
      if (it == counts.end()) it = counts.emplace(t, 0).first;
      ++it->second;
      ++total;
    }
  }
  if (total == 0) throw RuntimeFailure("cannot build a vocabulary from a corpus with no tokens");
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= min_count || is_anchor(w)) kept.emplace_back(w, c);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words;
  std::vector<std::uint64_t> freq;
  for (auto& [w, c] : kept) {
    words.push_back(w);
    freq.push_back(c);
  }
  return Vocabulary(std::move(words), std::move(freq));
}

std::optional<std::size_t> EmbeddingModel::find(std::string_view word) const {
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] == word) return i;
  }
  return std::nullopt;
}

TrainResult train(const SentenceTokens& sentences, const TrainConfig& config) {
  config.validate();
  const Vocabulary vocab = build_vocab(sentences, config.min_count);
  if (vocab.size() == 0) throw RuntimeFailure("vocabulary is empty after min_count filtering");
  const std::size_t dim = config.dim;

  std::vector<std::vector<std::uint32_t>> corpus;
  corpus.reserve(sentences.size());
  std::uint64_t train_words = 0;
  for (const auto& s : sentences) {
    std::vector<std::uint32_t> ids;
    for (const auto& t : s) {
      if (auto id = vocab.find(t)) ids.push_back(static_cast<std::uint32_t>(*id));
    }
    train_words += ids.size();
    corpus.push_back(std::move(ids));
  }

  std::vector<double> keep_prob(vocab.size(), 1.0);
  const double threshold = config.subsample * static_cast<double>(vocab.total());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (is_anchor(vocab.word(i))) continue;
    const double f = static_cast<double>(vocab.count(i));
    keep_prob[i] = std::min(1.0, (std::sqrt(f / threshold) + 1.0) * threshold / f);
  }

  TrainResult result;
  EmbeddingModel& model = result.model;
  model.words = vocab.words();
  model.dim = dim;
  model.config = config;
  model.vectors.resize(vocab.size() * dim);
  Rng init(derive_seed(config.seed, "init"));
  for (float& x : model.vectors) {
    x = static_cast<float>((uniform01(init) - 0.5) / static_cast<double>(dim));
  }
  std::vector<float> syn1(vocab.size() * dim, 0.0f);

  const Sampler sampler(vocab);
  const Trainer trainer{config,  corpus,       sampler, keep_prob, model.vectors,
                        syn1,    static_cast<double>(config.epochs) * static_cast<double>(train_words)};
  std::atomic<std::uint64_t> processed{0};

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss = 0;
    std::uint64_t pairs = 0;
    if (config.threads <= 1) {
      Rng rng(derive_seed(config.seed, epoch));
      trainer.run(0, corpus.size(), rng, processed, loss, pairs);
    } else {
      const int workers = config.threads;
      const std::size_t n = corpus.size();
#pragma omp parallel num_threads(workers) reduction(+ : loss, pairs)
      {
        const auto t = static_cast<std::size_t>(omp_get_thread_num());
        const auto nt = static_cast<std::size_t>(omp_get_num_threads());
        const std::size_t begin = n * t / nt;
        const std::size_t end = n * (t + 1) / nt;
        Rng rng(derive_seed(derive_seed(config.seed, epoch), t + 1));
        trainer.run(begin, end, rng, processed, loss, pairs);
      }
    }
    result.epoch_loss.push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
    const bool finite = std::isfinite(loss) &&
                        std::all_of(model.vectors.begin(), model.vectors.end(),
                                    [](float x) { return std::isfinite(x); });
    if (!finite) {
      throw RuntimeFailure("training diverged in epoch " + std::to_string(epoch + 1) +
                           " (non-finite weights); lower the learning rate");
    }
  }
  return result;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) throw RuntimeFailure("cosine similarity of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::string serialize_model(const ArtifactHeader& header, const EmbeddingModel& model) {
  std::string out = format_header(header);
  out += '\n';
  out += std::to_string(model.size()) + ' ' + std::to_string(model.dim) + '\n';
  char buf[32];
  for (std::size_t i = 0; i < model.size(); ++i) {
    out += model.words[i];
    for (float x : model.vector(i)) {
      std::snprintf(buf, sizeof buf, " %.9g", static_cast<double>(x));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

EmbeddingModel parse_model(std::string_view content, ArtifactHeader* header,
                           std::string_view source) {
  const std::string src(source);
  auto lines = split_view(content, '\n');
  std::size_t line = 0;
  EmbeddingModel model;
  if (!lines.empty() && lines[0].starts_with("#semno")) {
    const ArtifactHeader h = parse_header(lines[0], source);
    auto get = [&](const char* key) -> const std::string* { return h.find(key); };
    try {
      if (auto v = get("dim")) model.config.dim = std::stoul(*v);
      if (auto v = get("window")) model.config.window = std::stoul(*v);
      if (auto v = get("negatives")) model.config.negatives = std::stoul(*v);
      if (auto v = get("epochs")) model.config.epochs = std::stoul(*v);
      if (auto v = get("learning_rate")) model.config.learning_rate = std::stod(*v);
      if (auto v = get("subsample")) model.config.subsample = std::stod(*v);
      if (auto v = get("min_count")) model.config.min_count = std::stoul(*v);
      if (auto v = get("train_seed")) model.config.seed = std::stoull(*v);
    } catch (const std::exception&) {
      throw ArtifactError(src + ": unreadable training parameters in header");
    }
    if (header) *header = h;
    ++line;
  }
  if (line >= lines.size()) throw ArtifactError(src + ": missing '|V| dim' line");
  std::size_t count = 0;
  {
    std::istringstream dims{std::string(lines[line])};
    if (!(dims >> count >> model.dim) || model.dim == 0) {
      throw ArtifactError(src + ": malformed '|V| dim' line");
    }
    ++line;
  }
  model.words.reserve(count);
  model.vectors.reserve(count * model.dim);
  for (; line < lines.size(); ++line) {
    std::string_view row = lines[line];
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (row.empty()) continue;
    auto fields = split_view(row, ' ');
    while (!fields.empty() && fields.back().empty()) fields.pop_back();
    if (fields.size() != model.dim + 1) {
      throw ArtifactError(src + ":" + std::to_string(line + 1) + ": expected " +
                          std::to_string(model.dim) + " components");
    }
    model.words.emplace_back(fields[0]);
    for (std::size_t d = 1; d < fields.size(); ++d) {
      const std::string token(fields[d]);
      char* end = nullptr;
      const float x = std::strtof(token.c_str(), &end);
      if (end != token.c_str() + token.size() || !std::isfinite(x)) {
        throw ArtifactError(src + ":" + std::to_string(line + 1) + ": bad vector component");
      }
      model.vectors.push_back(x);
    }
  }
  if (model.words.size() != count) {
    throw ArtifactError(src + ": header announces " + std::to_string(count) + " words, found " +
                        std::to_string(model.words.size()));
  }
  model.config.dim = model.dim;
  return model;
}

void save_model(const std::filesystem::path& path, const ArtifactHeader& header,
                const EmbeddingModel& model) {
  write_atomic(path, serialize_model(header, model));
}

EmbeddingModel load_model(const std::filesystem::path& path, ArtifactHeader* header) {
  return parse_model(read_file(path), header, path.string());
}

}  // namespace semno
