#include <omp.h>

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "semno/config.hpp"
#include "semno/error.hpp"
#include "semno/pipeline.hpp"

namespace {

struct Common {
  std::string config_file;
  int threads = 0;
  std::string seed;
  bool force = false;
  bool dry_run = false;
  bool with_pip = false;
};

// Flag spellings that differ from the config key they set.
std::string key_for(const std::string& stage, std::string flag) {
  for (auto& c : flag) {
    if (c == '-') c = '_';
  }
  if (stage == "pip") {
    static const std::map<std::string, std::string> pip_alias = {
        {"window", "pip_window"}, {"basic", "cleansed"}, {"infused", "infused"}};
    if (const auto it = pip_alias.find(flag); it != pip_alias.end()) return it->second;
  }
  return flag;
}

// Applies `--key=value` and `--key value` pairs left over by the parser.
void apply_overrides(semno::Config& config, const std::string& stage,
                     const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() < 3) {
      throw semno::ConfigError("unexpected argument '" + arg + "'");
    }
    std::string body = arg.substr(2);
    std::string value;
    if (const auto eq = body.find('='); eq != std::string::npos) {
      value = body.substr(eq + 1);
      body.resize(eq);
    } else if (i + 1 < extras.size() && extras[i + 1].rfind("--", 0) != 0) {
      value = extras[++i];
    } else {
      throw semno::ConfigError("option '" + arg + "' needs a value");
    }
    config.set(key_for(stage, body), value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semno: anchor-infused semantic noise filtering for labelled text corpora"};
  app.require_subcommand(1);
  Common common;

  std::vector<std::pair<std::string, std::string>> commands;
  for (const auto& s : semno::Pipeline::stage_names()) commands.emplace_back(s, "run the " + s + " stage");
  commands.emplace_back("run", "run cleanse, infuse, embed, graph and filter in order");

  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->allow_extras();
    sub->add_option("--config", common.config_file, "key = value configuration file");
    sub->add_option("--threads", common.threads, "worker threads (default: all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", common.seed, "master seed");
    sub->add_flag("--force", common.force, "accept upstream artifacts with a different lineage");
    sub->add_flag("--dry-run", common.dry_run, "print the stage plan without running it");
    if (name == "run") sub->add_flag("--pip", common.with_pip, "also run the pip stage");
    sub->footer("Any configuration key can be overridden as --key=value (dashes or underscores).");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string stage = sub->get_name();
    semno::Config config = semno::Config::defaults();
    if (!common.config_file.empty()) config.load_file(common.config_file);
    apply_overrides(config, stage, sub->remaining());
    if (!common.seed.empty()) config.set("seed", common.seed);

    semno::RunOptions options;
    options.force = common.force;
    options.dry_run = common.dry_run;
    options.threads = common.threads > 0 ? common.threads : omp_get_num_procs();
    options.log = &std::cerr;
    semno::Pipeline pipeline(std::move(config), options);
    if (stage == "run") {
      pipeline.run_all(common.with_pip);
    } else {
      pipeline.run_stage(stage);
    }
  } catch (const std::exception& e) {
    std::cerr << "semno: error: " << e.what() << '\n';
    return semno::exit_code_for(e);
  }
  return 0;
}
