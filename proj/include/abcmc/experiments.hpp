#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "abcmc/abc.hpp"
#include "abcmc/coalescent.hpp"
#include "abcmc/models.hpp"
#include "abcmc/stats.hpp"
#include "abcmc/validation.hpp"

namespace abcmc {

struct ValidationParams {
  std::size_t n_predictive = 500;
  double alpha = 0.05;
};

// Fully explicit experiment description. Named experiments (fig1..fig6,
// validate_gl, validate_popgen) expand to one of these; "custom" configs are
// read from JSON directly.
struct ExperimentConfig {
  std::string experiment = "custom";
  std::string model1;
  std::string model2;
  std::vector<std::vector<StatisticSpec>> statistic_sets;
  // Observation counts for scalar models, locus counts for popgen models.
  std::vector<std::size_t> sample_sizes;
  std::size_t replications = 100;
  AbcConfig abc;
  std::optional<PopGenConfig> popgen;
  // Present on validation experiments, which test predictive-mean equality
  // instead of recording model-choice posteriors.
  std::optional<ValidationParams> validation;
  std::vector<double> true_param_m1;
  std::vector<double> true_param_m2;
  SeedSpec seed{20120903, 0};
  std::string output_dir;

  bool is_validation() const { return validation.has_value(); }
  void validate() const;
  std::string to_json_string() const;
  static ExperimentConfig from_json_string(const std::string& text);
};

// Deterministic, versioned expansion of a named experiment.
ExperimentConfig expand_config(const std::string& experiment_id);

// Desk-scale reduction: multiplies the table size, the replication count
// and the pop-gen loci/individuals by the factor, keeping quantile levels
// and scalar sample sizes fixed.
void apply_scale(ExperimentConfig& cfg, double scale);

struct ReplicationRecord {
  std::string stat_set;
  std::size_t sample_size = 0;
  std::size_t replication = 0;
  int true_model = 1;
  std::vector<double> true_params;

  std::optional<double> tolerance;
  std::optional<std::size_t> accepted_total;
  std::optional<std::size_t> accepted_m1;
  std::optional<std::size_t> accepted_m2;
  std::optional<double> posterior_prob_m1;
  std::optional<double> bayes_factor_12;

  std::optional<double> val_statistic;
  std::optional<std::size_t> val_dof;
  std::optional<double> val_p_value;
  std::optional<bool> val_regularized;
  std::optional<std::string> val_decision;
  std::optional<double> val_tolerance_m1;
  std::optional<double> val_tolerance_m2;
};

std::string records_csv_header();
std::string record_to_csv_line(const ReplicationRecord& record);
std::vector<ReplicationRecord> parse_records_csv(const std::string& text);

struct ExperimentOutputs {
  std::vector<ReplicationRecord> records;
  std::string records_path;
  std::string summary_path;
  std::string config_path;
};

// Runs every (statistic set, sample size, replication, true model) cell,
// writing records.csv, summary.json and config_expanded.json under
// cfg.output_dir. Completed cells found in an existing records.csv are not
// recomputed; seeds are addressed per cell, so a resumed run and a fresh
// run produce byte-identical files.
ExperimentOutputs run_experiment(const ExperimentConfig& cfg);

// Mean-reachability verdicts for every (statistic set, true model) pair of
// the experiment, as CSV.
std::string emit_compatibility_table(const ExperimentConfig& cfg);

}  // namespace abcmc
