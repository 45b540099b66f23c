#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "abcmc/errors.hpp"
#include "abcmc/experiments.hpp"
#include "abcmc/parallel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct CommonOptions {
  std::string experiment;
  std::string config_path;
  double scale = 1.0;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void add_common_options(CLI::App& cmd, CommonOptions& opts,
                        bool allow_config_file) {
  auto* experiment = cmd.add_option("--experiment", opts.experiment,
                                    "Named experiment id (fig1..fig6, "
                                    "validate_gl, validate_popgen)");
  if (allow_config_file) {
    auto* config = cmd.add_option("--config", opts.config_path,
                                  "Custom experiment config (JSON file)");
    config->excludes(experiment);
    experiment->excludes(config);
  }
  cmd.add_option("--scale", opts.scale,
                 "Budget factor applied to table size, replications and "
                 "pop-gen loci/individuals");
  cmd.add_option("--seed", opts.seed, "Root seed override");
  cmd.add_option("--out", opts.out_dir, "Output directory override");
}

abcmc::ExperimentConfig load_config(const CommonOptions& opts) {
  abcmc::ExperimentConfig cfg;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) {
      throw abcmc::ConfigError("--config",
                               "cannot read file '" + opts.config_path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    cfg = abcmc::ExperimentConfig::from_json_string(buffer.str());
  } else if (!opts.experiment.empty()) {
    cfg = abcmc::expand_config(opts.experiment);
  } else {
    throw abcmc::ConfigError("--experiment", "an experiment id is required");
  }
  abcmc::apply_scale(cfg, opts.scale);
  if (opts.seed.has_value()) cfg.seed = abcmc::SeedSpec{*opts.seed, 0};
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  return cfg;
}

int run_and_report(const abcmc::ExperimentConfig& cfg) {
  const abcmc::ExperimentOutputs outputs = abcmc::run_experiment(cfg);
  std::cout << "experiment: " << cfg.experiment << "\n"
            << "records:    " << outputs.records_path << " ("
            << outputs.records.size() << " rows)\n"
            << "summary:    " << outputs.summary_path << "\n"
            << "config:     " << outputs.config_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Likelihood-free model choice via rejection sampling"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run_cmd =
      app.add_subcommand("run", "Run an experiment and write its outputs");
  add_common_options(*run_cmd, run_opts, true);

  CommonOptions expand_opts;
  auto* expand_cmd = app.add_subcommand(
      "expand", "Print the fully explicit config for a named experiment");
  add_common_options(*expand_cmd, expand_opts, false);

  CommonOptions compat_opts;
  auto* compat_cmd = app.add_subcommand(
      "compat",
      "Print mean-reachability verdicts per statistic set and true model");
  add_common_options(*compat_cmd, compat_opts, true);

  CommonOptions validate_opts;
  auto* validate_cmd = app.add_subcommand(
      "validate", "Run a predictive-mean validation experiment");
  add_common_options(*validate_cmd, validate_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (run_cmd->parsed()) {
      return run_and_report(load_config(run_opts));
    }
    if (expand_cmd->parsed()) {
      std::cout << load_config(expand_opts).to_json_string();
      return kExitOk;
    }
    if (compat_cmd->parsed()) {
      const abcmc::ExperimentConfig cfg = load_config(compat_opts);
      const std::string table = abcmc::emit_compatibility_table(cfg);
      std::cout << table;
      if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        const auto path =
            std::filesystem::path(cfg.output_dir) / "compatibility.csv";
        std::ofstream file(path);
        if (!file) {
          throw abcmc::DomainError("cannot write " + path.string());
        }
        file << table;
      }
      return kExitOk;
    }
    const abcmc::ExperimentConfig cfg = load_config(validate_opts);
    if (!cfg.is_validation()) {
      throw abcmc::ConfigError(
          "validation", "experiment '" + cfg.experiment +
                            "' has no validation stage; use 'run' instead");
    }
    return run_and_report(cfg);
  } catch (const abcmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}
