#pragma once

#include <exception>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semno/artifact.hpp"
#include "semno/config.hpp"
#include "semno/evaluate.hpp"

namespace semno {

struct RunOptions {
  /// Accept upstream artifacts whose lineage differs from the current config.
  bool force = false;
  /// Print what would run instead of running it.
  bool dry_run = false;
  /// OpenMP threads; 1 makes every stage bitwise reproducible.
  int threads = 1;
  std::ostream* log = nullptr;
};

/// Runs pipeline stages against the artifact paths named in a Config.
///
/// Stages: synth, cleanse, infuse, embed, graph, filter, pip, sample, score.
/// Every artifact header carries the lineage (configuration digest) of the
/// stage that wrote it; a stage refuses upstream artifacts built from a
/// different configuration unless `force` is set.
class Pipeline {
 public:
  Pipeline(Config config, RunOptions options);

  static const std::vector<std::string>& stage_names();

  /// Throws ConfigError for an unknown stage name.
  void run_stage(std::string_view name);
  /// cleanse, infuse, embed, graph, filter, and pip when requested.
  void run_all(bool with_pip = false);
  /// One line per stage that run_all would execute.
  std::vector<std::string> plan(bool with_pip = false) const;

  /// Configuration that determines a stage's output, upstream stages included.
  std::vector<std::pair<std::string, std::string>> lineage_params(std::string_view stage) const;
  ArtifactHeader header_for(std::string_view stage, std::string_view tag) const;

  const Config& config() const { return config_; }

 private:
  ArtifactHeader check_upstream(const std::string& key, std::string_view tag,
                                std::string_view producer) const;
  void log_line(const std::string& line) const;

  void synth();
  void cleanse();
  void infuse();
  void embed();
  void graph();
  void filter();
  void pip();
  void sample();
  void score();

  Config config_;
  RunOptions options_;
};

/// The generator settings the synth stage derives from the `synth_*` keys and
/// the master seed.
SyntheticSpec synthetic_spec(const Config& config);

/// 0 success, 2 configuration error, 3 missing or mismatched artifact,
/// 4 runtime failure.
int exit_code_for(const std::exception& error);

}  // namespace semno
