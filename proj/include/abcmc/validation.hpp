#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "abcmc/abc.hpp"
#include "abcmc/models.hpp"
#include "abcmc/numerics.hpp"
#include "abcmc/stats.hpp"

namespace abcmc {

struct MeanAndCov {
  SummaryVector mean;
  // Covariance of the mean: empirical covariance (divisor L-1) divided by L.
  Matrix cov_of_mean;
};

MeanAndCov estimate_predictive_mean(const std::vector<SummaryVector>& draws);

enum class ValidationDecision {
  // Predictive means disagree: the statistic separates the models.
  reject_h0_statistic_usable,
  // Predictive means are indistinguishable: model choice built on this
  // statistic is untrustworthy.
  fail_to_reject_h0_statistic_inadequate,
};

const char* validation_decision_name(ValidationDecision d);

struct ValidationReport {
  SummaryVector mu_hat_1;
  SummaryVector mu_hat_2;
  Matrix v1;
  Matrix v2;
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  bool regularized = false;
  double alpha = 0.05;
  ValidationDecision decision =
      ValidationDecision::fail_to_reject_h0_statistic_inadequate;

  // Pipeline provenance, filled by validate_statistic_choice.
  SeedSpec seed;
  double tolerance_m1 = 0.0;
  double tolerance_m2 = 0.0;
  std::size_t accepted_m1 = 0;
  std::size_t accepted_m2 = 0;
  std::size_t predictive_draws = 0;

  std::string to_json_string() const;
};

// Chi-square test of a common predictive mean:
// (mu1 - mu2)' (V1 + V2)^-1 (mu1 - mu2) against chi2 with d degrees of
// freedom. Rejection means the statistic can tell the models apart.
ValidationReport common_mean_test(const SummaryVector& mu1, const Matrix& v1,
                                  const SummaryVector& mu2, const Matrix& v2,
                                  double alpha);

// Full pipeline. Each model gets its own reference table of n_total/2 rows
// and its own tolerance, so both posterior samples are non-empty by
// construction.
ValidationReport validate_statistic_choice(
    const ModelSpec& m1, const ModelSpec& m2,
    const std::vector<StatisticSpec>& specs, const Sample& observed,
    const AbcConfig& cfg, std::size_t n_predictive, double alpha,
    const SeedSpec& seed);

// Same pipeline on pre-built single-model tables, for callers that amortize
// table construction over many observed datasets.
ValidationReport validate_with_tables(
    const ReferenceTable& table_m1, const ReferenceTable& table_m2,
    const ModelSpec& m1, const ModelSpec& m2,
    const std::vector<StatisticSpec>& specs, const Sample& observed,
    const AbcConfig& cfg, std::size_t n_predictive, double alpha,
    const SeedSpec& seed);

}  // namespace abcmc
