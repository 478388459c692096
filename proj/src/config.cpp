#include "semno/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "semno/artifact.hpp"
#include "semno/error.hpp"

namespace semno {

namespace {

// key, default, file name used when a path key is left empty.
struct KeyInfo {
  const char* key;
  const char* value;
  const char* file = nullptr;
};

constexpr KeyInfo kKeys[] = {
    {"workdir", "semno-out"},
    {"input", "corpus.csv"},
    {"corpus_artifact", "", "corpus.tsv"},
    {"cleansed", "", "cleansed.tsv"},
    {"infused", "", "infused.tsv"},
    {"model", "", "model.txt"},
    {"graph", "", "graph.tsv"},
    {"hierarchy", "", "hierarchy.tsv"},
    {"verdicts", "", "verdicts.tsv"},
    {"filtered", "", "filtered.tsv"},
    {"summary", "", "summary.csv"},
    {"pip_report", "", "pip.csv"},
    {"manifest", "", "manifest.tsv"},
    {"annotations", "", "annotations.tsv"},
    {"score_report", "", "score.csv"},
    {"class_col", "Component"},
    {"text_col", "Ticket Text"},
    {"id_col", ""},
    {"delimiter", ","},
    {"stopwords", "english"},
    {"seed", "42"},
    {"dim", "100"},
    {"window", "5"},
    {"negatives", "5"},
    {"epochs", "5"},
    {"learning_rate", "0.025"},
    {"subsample", "0.001"},
    {"min_count", "5"},
    {"theta", "0.6"},
    {"max_depth", "3"},
    {"min_members", "3"},
    {"q_gain_floor", "0.0001"},
    {"alpha", "0.5,1.0"},
    {"pip_window", "5"},
    {"max_vocab", "2000"},
    {"per_class", "100"},
    {"synth_classes", "4"},
    {"synth_topic_vocab", "50"},
    {"synth_noise_vocab", "100"},
    {"synth_sentences", "2000"},
    {"synth_noise_ratio", "0.3"},
    {"synth_min_len", "6"},
    {"synth_max_len", "12"},
    {"synth_doc_sentences", "10"},
};

const KeyInfo* info(const std::string& key) {
  for (const auto& k : kKeys) {
    if (key == k.key) return &k;
  }
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Config Config::defaults() {
  Config c;
  for (const auto& k : kKeys) c.values_[k.key] = k.value;
  return c;
}

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  parse(ss.str(), path.string());
}

void Config::parse(std::string_view text, std::string_view source) {
  std::size_t line_no = 0;
  for (auto raw : split_view(text, '\n')) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void Config::set(const std::string& key, const std::string& value) {
  if (!info(key)) throw ConfigError("unknown configuration key '" + key + "'");
  values_[key] = value;
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
  return it->second;
}

std::size_t Config::get_size(const std::string& key) const {
  const std::string& v = get(key);
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
  }
  return out;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = get(key);
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (auto part : split_view(get(key), ',')) {
    const std::string s = trim(part);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected comma-separated numbers, got '" + get(key) + "'");
    }
  }
  return out;
}

char Config::get_char(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "\\t" || v == "tab") return '\t';
  if (v.size() != 1) throw ConfigError(key + ": expected a single character, got '" + v + "'");
  return v[0];
}

std::filesystem::path Config::path(const std::string& key) const {
  const KeyInfo* k = info(key);
  const std::string& v = get(key);
  if (!v.empty() || !k || !k->file) return v;
  return std::filesystem::path(get("workdir")) / k->file;
}

}  // namespace semno
