#include "semno/pipeline.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>

#include "semno/cleanse.hpp"
#include "semno/corpusio.hpp"
#include "semno/embed.hpp"
#include "semno/error.hpp"
#include "semno/evaluate.hpp"
#include "semno/filter.hpp"
#include "semno/graph.hpp"
#include "semno/hierarchy.hpp"
#include "semno/infuse.hpp"
#include "semno/pipdim.hpp"
#include "semno/rng.hpp"

namespace semno {

namespace {

using Params = std::vector<std::pair<std::string, std::string>>;

// Stage name, upstream artifact keys, output artifact keys.
struct StageInfo {
  const char* name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

const std::vector<StageInfo>& stage_table() {
  static const std::vector<StageInfo> table = {
      {"synth", {}, {"input", "annotations"}},
      {"cleanse", {"input"}, {"corpus_artifact", "cleansed"}},
      {"infuse", {"cleansed"}, {"infused"}},
      {"embed", {"infused"}, {"model"}},
      {"graph", {"model"}, {"graph", "hierarchy"}},
      {"filter", {"cleansed", "hierarchy"}, {"verdicts", "filtered", "summary"}},
      {"pip", {"cleansed", "infused"}, {"pip_report"}},
      {"sample", {"verdicts"}, {"manifest"}},
      {"score", {"verdicts", "annotations"}, {"score_report"}},
  };
  return table;
}

const StageInfo& stage_info(std::string_view name) {
  for (const auto& s : stage_table()) {
    if (name == s.name) return s;
  }
  std::string names;
  for (const auto& s : stage_table()) names += std::string(names.empty() ? "" : ", ") + s.name;
  throw ConfigError("unknown stage '" + std::string(name) + "' (expected one of " + names + ")");
}

std::string file_digest(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return "unavailable";
  return hex64(fnv1a64(read_file(path)));
}

std::string stopword_digest(const std::string& source) {
  try {
    return hex64(load_stopwords(source).digest());
  } catch (const Error&) {
    return "unavailable";
  }
}

std::string lineage_digest(const Params& params) {
  std::string text;
  for (const auto& [k, v] : params) text += k + '=' + v + '\n';
  return hex64(fnv1a64(text));
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class StageTimer {
 public:
  StageTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string seconds_text(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

}  // namespace

Pipeline::Pipeline(Config config, RunOptions options)
    : config_(std::move(config)), options_(options) {
  if (options_.threads < 1) throw ConfigError("threads must be at least 1");
  omp_set_num_threads(options_.threads);
}

const std::vector<std::string>& Pipeline::stage_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& s : stage_table()) out.emplace_back(s.name);
    return out;
  }();
  return names;
}

Params Pipeline::lineage_params(std::string_view stage) const {
  auto add = [&](Params& p, std::initializer_list<const char*> keys) {
    for (const char* k : keys) p.emplace_back(k, config_.get(k));
  };
  Params p;
  if (stage == "synth") {
    add(p, {"seed", "synth_classes", "synth_topic_vocab", "synth_noise_vocab", "synth_sentences",
            "synth_noise_ratio", "synth_min_len", "synth_max_len", "synth_doc_sentences"});
    return p;
  }
  stage_info(stage);
  add(p, {"class_col", "text_col", "id_col", "delimiter", "stopwords"});
  p.emplace_back("stopwords_digest", stopword_digest(config_.get("stopwords")));
  p.emplace_back("input_digest", file_digest(config_.path("input")));
  if (stage == "cleanse") return p;
  add(p, {"seed"});
  if (stage == "infuse") return p;
  if (stage == "pip") {
    add(p, {"alpha", "pip_window", "max_vocab"});
    return p;
  }
  add(p, {"dim", "window", "negatives", "epochs", "learning_rate", "subsample", "min_count"});
  if (stage == "embed") return p;
  add(p, {"theta", "max_depth", "min_members", "q_gain_floor"});
  if (stage == "graph" || stage == "filter") return p;
  if (stage == "sample") {
    add(p, {"per_class"});
    return p;
  }
  p.emplace_back("annotations_digest", file_digest(config_.path("annotations")));
  return p;  // score
}

ArtifactHeader Pipeline::header_for(std::string_view stage, std::string_view tag) const {
  ArtifactHeader h;
  h.stage = std::string(tag);
  h.params = lineage_params(stage);
  h.lineage = lineage_digest(h.params);
  return h;
}

ArtifactHeader Pipeline::check_upstream(const std::string& key, std::string_view tag,
                                        std::string_view producer) const {
  const std::filesystem::path path = config_.path(key);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ArtifactError("missing " + std::string(tag) + " artifact " + path.string() +
                        "; run `semno " + std::string(producer) + "` first");
  }
  const ArtifactHeader header = read_header(path);
  expect_stage(header, tag, path);
  const Params expected = lineage_params(producer);
  std::string diff;
  for (const auto& [k, v] : expected) {
    const std::string* have = header.find(k);
    if (v == "unavailable" || (have && *have == v)) continue;
    diff += "\n  " + k + ": artifact=" + (have ? "'" + *have + "'" : "<absent>") + " config='" +
            v + "'";
  }
  if (!diff.empty()) {
    const std::string msg = path.string() + " was produced with a different configuration:" + diff;
    if (!options_.force) {
      throw ArtifactError(msg + "\nrerun `semno " + std::string(producer) +
                          "` or pass --force to use it anyway");
    }
    log_line("warning: " + msg);
  }
  return header;
}

void Pipeline::log_line(const std::string& line) const {
  if (options_.log) *options_.log << "[semno] " << line << '\n' << std::flush;
}

void Pipeline::run_stage(std::string_view name) {
  const StageInfo& info = stage_info(name);
  if (options_.dry_run) {
    std::string line = "would run " + std::string(name) + ":";
    for (const auto& k : info.inputs) line += " " + config_.path(k).string();
    line += " ->";
    for (const auto& k : info.outputs) line += " " + config_.path(k).string();
    log_line(line);
    return;
  }
  for (const auto& k : info.outputs) {
    const auto parent = config_.path(k).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
  }
  const StageTimer timer;
  if (name == "synth") synth();
  else if (name == "cleanse") cleanse();
  else if (name == "infuse") infuse();
  else if (name == "embed") embed();
  else if (name == "graph") graph();
  else if (name == "filter") filter();
  else if (name == "pip") pip();
  else if (name == "sample") sample();
  else score();
  log_line("stage=" + std::string(name) + " done in " + seconds_text(timer.seconds()));
}

std::vector<std::string> Pipeline::plan(bool with_pip) const {
  std::vector<std::string> stages = {"cleanse", "infuse", "embed", "graph", "filter"};
  if (with_pip) stages.emplace_back("pip");
  std::vector<std::string> lines;
  for (const auto& s : stages) {
    const StageInfo& info = stage_info(s);
    std::string line = s + ":";
    for (const auto& k : info.inputs) line += " " + config_.path(k).string();
    line += " ->";
    for (const auto& k : info.outputs) line += " " + config_.path(k).string();
    lines.push_back(std::move(line));
  }
  return lines;
}

void Pipeline::run_all(bool with_pip) {
  if (options_.dry_run) {
    for (const auto& line : plan(with_pip)) log_line("would run " + line);
    return;
  }
  for (const char* s : {"cleanse", "infuse", "embed", "graph", "filter"}) run_stage(s);
  if (with_pip) run_stage("pip");
}

SyntheticSpec synthetic_spec(const Config& config) {
  SyntheticSpec spec;
  spec.classes = config.get_size("synth_classes");
  spec.topic_vocabulary = config.get_size("synth_topic_vocab");
  spec.noise_vocabulary = config.get_size("synth_noise_vocab");
  spec.sentences_per_class = config.get_size("synth_sentences");
  spec.noise_ratio = config.get_double("synth_noise_ratio");
  spec.min_length = config.get_size("synth_min_len");
  spec.max_length = config.get_size("synth_max_len");
  spec.sentences_per_document = config.get_size("synth_doc_sentences");
  spec.seed = derive_seed(config.get_u64("seed"), "synth");
  return spec;
}

void Pipeline::synth() {
  const SyntheticSpec spec = synthetic_spec(config_);
  const SyntheticCorpus s = generate_synthetic(spec);
  write_atomic(config_.path("input"), synthetic_csv(s));
  const ArtifactHeader h = header_for("synth", "truth");
  write_atomic(config_.path("annotations"),
               "# truth " + format_header(h).substr(1) + '\n' + serialize_annotations(s.truth));
  log_line("synth: " + std::to_string(s.corpus.documents.size()) + " documents, " +
           std::to_string(s.truth.size()) + " sentences, " + std::to_string(s.labels.size()) +
           " classes");
}

void Pipeline::cleanse() {
  CsvSchema schema;
  schema.class_column = config_.get("class_col");
  schema.text_column = config_.get("text_col");
  schema.id_column = config_.get("id_col");
  schema.delimiter = config_.get_char("delimiter");
  const Corpus corpus = load_corpus(config_.path("input"), schema);
  for (const auto& w : corpus.warnings) log_line("warning: " + w);
  const StopwordList stops = load_stopwords(config_.get("stopwords"));
  const auto sentences = clean_corpus(corpus, stops);
  save_corpus(config_.path("corpus_artifact"), header_for("cleanse", "corpus"), corpus);
  save_sentences(config_.path("cleansed"), header_for("cleanse", "cleanse"), sentences);
  log_line("cleanse: " + std::to_string(corpus.documents.size()) + " documents, " +
           std::to_string(corpus.sentence_count()) + " raw sentences, " +
           std::to_string(sentences.size()) + " cleansed sentences, skipped " +
           std::to_string(corpus.skipped_empty) + " empty and " +
           std::to_string(corpus.skipped_malformed) + " malformed rows");
}

void Pipeline::infuse() {
  check_upstream("cleansed", "cleanse", "cleanse");
  const auto sentences = load_sentences(config_.path("cleansed"), nullptr);
  const auto infused = infuse_corpus(sentences, derive_seed(config_.get_u64("seed"), "infuse"));
  std::size_t anchors = 0;
  for (const auto& s : infused) anchors += s.anchor_positions.size();
  save_infused(config_.path("infused"), header_for("infuse", "infuse"), infused);
  log_line("infuse: " + std::to_string(infused.size()) + " sentences, " + std::to_string(anchors) +
           " anchors inserted");
}

void Pipeline::embed() {
  check_upstream("infused", "infuse", "infuse");
  const auto infused = load_infused(config_.path("infused"), nullptr);
  TrainConfig tc;
  tc.dim = config_.get_size("dim");
  tc.window = config_.get_size("window");
  tc.negatives = config_.get_size("negatives");
  tc.epochs = config_.get_size("epochs");
  tc.learning_rate = config_.get_double("learning_rate");
  tc.subsample = config_.get_double("subsample");
  tc.min_count = config_.get_size("min_count");
  tc.seed = derive_seed(config_.get_u64("seed"), "embed");
  tc.threads = options_.threads;
  const TrainResult r = train(token_views(infused), tc);
  ArtifactHeader h = header_for("embed", "embed");
  h.params.emplace_back("train_seed", std::to_string(tc.seed));
  save_model(config_.path("model"), h, r.model);
  std::string loss;
  for (double l : r.epoch_loss) loss += (loss.empty() ? "" : ",") + number(l).substr(0, 8);
  log_line("embed: " + std::to_string(r.model.size()) + " words, dim " +
           std::to_string(r.model.dim) + ", epoch loss " + loss);
}

void Pipeline::graph() {
  check_upstream("model", "embed", "embed");
  const EmbeddingModel model = load_model(config_.path("model"), nullptr);
  const SemanticGraph g = build_graph(model, config_.get_double("theta"));
  HierarchyConfig hc;
  hc.max_depth = config_.get_size("max_depth");
  hc.min_members = config_.get_size("min_members");
  hc.q_gain_floor = config_.get_double("q_gain_floor");
  hc.seed = derive_seed(config_.get_u64("seed"), "graph");
  const CommunityHierarchy h = recursive_cluster(g, hc);
  std::size_t anchored = 0;
  for (const auto& c : h.retained) {
    for (const auto& m : c.members) {
      if (is_anchor(m)) {
        ++anchored;
        break;
      }
    }
  }
  save_graph(config_.path("graph"), header_for("graph", "graph"), g);
  ArtifactHeader hh = header_for("graph", "hierarchy");
  hh.params.emplace_back("root_modularity", number(h.root_modularity));
  hh.params.emplace_back("retained", std::to_string(h.retained.size()));
  hh.params.emplace_back("anchored", std::to_string(anchored));
  save_hierarchy(config_.path("hierarchy"), hh, h.retained);
  log_line("graph: " + std::to_string(g.nodes.size()) + " nodes, " +
           std::to_string(g.edges.size()) + " edges, " + std::to_string(h.roots.size()) +
           " top-level communities (Q=" + number(h.root_modularity).substr(0, 6) + "), " +
           std::to_string(h.retained.size()) + " retained, " + std::to_string(anchored) +
           " anchored");
  if (anchored == 0) log_line("warning: no retained community contains an anchor");
}

void Pipeline::filter() {
  check_upstream("hierarchy", "hierarchy", "graph");
  check_upstream("cleansed", "cleanse", "cleanse");
  const auto sentences = load_sentences(config_.path("cleansed"), nullptr);
  const auto retained = load_hierarchy(config_.path("hierarchy"), nullptr);
  const AnchoredCommunitySet set = select_anchored(retained);
  const FilterResult r = filter_corpus(sentences, set);
  save_verdicts(config_.path("verdicts"), header_for("filter", "filter"), r.verdicts);
  save_sentences(config_.path("filtered"), header_for("filter", "filtered"), r.retained);
  write_atomic(config_.path("summary"), format_summary(header_for("filter", "summary"), r.summary));
  std::size_t noise = 0;
  for (const auto& v : r.verdicts) noise += v.is_noise;
  log_line("filter: " + std::to_string(set.communities.size()) + " anchored communities, " +
           std::to_string(r.verdicts.size()) + " sentences, " + std::to_string(noise) +
           " noise, " + std::to_string(r.retained.size()) + " retained");
}

void Pipeline::pip() {
  check_upstream("cleansed", "cleanse", "cleanse");
  check_upstream("infused", "infuse", "infuse");
  const auto basic = load_sentences(config_.path("cleansed"), nullptr);
  const auto infused = load_infused(config_.path("infused"), nullptr);
  PipOptions po;
  po.window = config_.get_size("pip_window");
  po.max_vocab = config_.get_size("max_vocab");
  po.alphas = config_.get_doubles("alpha");
  po.seed = derive_seed(config_.get_u64("seed"), "pip");
  const CorpusComparison cmp = compare_corpora(token_views(basic), token_views(infused), po);
  write_atomic(config_.path("pip_report"),
               format_header(header_for("pip", "pip")) + '\n' + format_comparison(cmp));
  for (std::size_t i = 0; i < po.alphas.size(); ++i) {
    log_line("pip: alpha=" + number(po.alphas[i]) + " k*(basic)=" +
             std::to_string(cmp.basic.curves[i].k_star) + " k*(infused)=" +
             std::to_string(cmp.infused.curves[i].k_star) + " delta=" +
             std::to_string(cmp.delta_k(i)));
  }
}

void Pipeline::sample() {
  check_upstream("verdicts", "filter", "filter");
  const auto verdicts = load_verdicts(config_.path("verdicts"), nullptr);
  const SampleManifest m = sample_for_annotation(verdicts, config_.get_size("per_class"),
                                                 derive_seed(config_.get_u64("seed"), "sample"));
  for (const auto& w : m.warnings) log_line("warning: " + w);
  write_atomic(config_.path("manifest"), format_manifest(header_for("sample", "sample"), m));
  log_line("sample: " + std::to_string(m.entries.size()) + " sentences selected");
}

void Pipeline::score() {
  check_upstream("verdicts", "filter", "filter");
  const auto verdicts = load_verdicts(config_.path("verdicts"), nullptr);
  const std::filesystem::path ann = config_.path("annotations");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(ann, ec)) {
    throw ArtifactError("missing annotations file " + ann.string());
  }
  const auto annotations = load_annotations(ann);
  const auto reports = semno::score(verdicts, annotations);
  write_atomic(config_.path("score_report"), format_reports(header_for("score", "score"), reports));
  const MacroAverage m = macro_average(reports);
  auto fmt = [](const std::optional<double>& v) { return v ? number(*v).substr(0, 6) : "undefined"; };
  log_line("score: " + std::to_string(annotations.size()) + " annotations, macro P=" +
           fmt(m.precision) + " R=" + fmt(m.recall) + " F1=" + fmt(m.f1));
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error)) return 2;
  if (dynamic_cast<const ArtifactError*>(&error)) return 3;
  return 4;
}

}  // namespace semno
