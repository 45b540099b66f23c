#pragma once

#include <vector>

#include "abcmc/models.hpp"
#include "abcmc/stats.hpp"

namespace abcmc {

struct ModelCompatibility {
  double infimum = 0.0;
  std::vector<double> argmin;
  bool compatible = false;
};

// Verdict semantics: a discriminant statistic pins the data-generating
// side, so model choice by this statistic can succeed; when both models can
// reach the target mean, the mean alone cannot tell them apart.
struct CompatibilityReport {
  SummaryVector mu0;
  ModelCompatibility model1;
  ModelCompatibility model2;
  bool discriminant = false;
};

// How close each model's mean map can get to mu0, the true model's mean at
// the true parameter. A model is compatible when the infimum over its
// parameter box falls below tol. The search is a 512-point-per-dimension
// grid refined by 40 rounds of coordinate-wise golden-section descent.
CompatibilityReport compatibility_report(const ModelSpec& m1,
                                         const ModelSpec& m2,
                                         const std::vector<StatisticSpec>& specs,
                                         int true_model_index,
                                         const std::vector<double>& true_param,
                                         double tol = 1e-3);

// Infimum search alone, exposed for diagnostics.
ModelCompatibility mean_gap_infimum(const ModelSpec& model,
                                    const std::vector<StatisticSpec>& specs,
                                    const SummaryVector& mu0, double tol);

}  // namespace abcmc
