#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "abcmc/coalescent.hpp"
#include "abcmc/rng.hpp"
#include "abcmc/stats.hpp"

namespace abcmc {

// A candidate model: prior sampler, simulator, and (where available) the
// analytic large-sample mean of each summary statistic as a function of the
// parameter. param_box bounds the parameter search used by compatibility
// diagnostics; for unbounded priors it covers all but negligible mass.
struct ModelSpec {
  std::string name;
  std::size_t param_dim = 1;
  std::vector<std::pair<double, double>> param_box;
  std::function<std::vector<double>(RngStream&)> sample_prior;
  std::function<Sample(const std::vector<double>&, std::size_t, RngStream&)>
      simulate;
  std::function<std::optional<double>(const std::vector<double>&,
                                      const StatisticSpec&)>
      mean_component;

  bool has_mean_map(const std::vector<StatisticSpec>& specs) const;
  // Throws UnsupportedError naming the first statistic without a map.
  SummaryVector mean_map(const std::vector<double>& theta,
                         const std::vector<StatisticSpec>& specs) const;
};

// y_i ~ N(theta, 1), theta ~ N(prior_mean, prior_var).
ModelSpec gaussian_model(double prior_mean, double prior_var);

// y_i ~ Laplace(theta, 1/sqrt(2)) so the variance is 1;
// theta ~ N(prior_mean, prior_var).
ModelSpec laplace_model(double prior_mean, double prior_var);

enum class GkVariant { g_fixed_zero, g_free };

// Quantile function of the g-and-k distribution at probability p.
double gk_quantile(double p, double a, double b, double g, double k);

// g-and-k sampler with A=0, B=1. g_fixed_zero draws k ~ U[-1/2, 5] with
// g = 0; g_free draws (g, k) ~ U[0,4] x U[-1/2, 5].
ModelSpec gk_quantile_model(GkVariant variant);

// Three-population microsatellite model; theta ~ U[prior_lo, prior_hi].
// The sample size passed to the simulator is the locus count.
ModelSpec popgen_model(const PopGenConfig& cfg, double prior_lo,
                       double prior_hi);

// Model ids used by configs: gaussian, laplace, gk1, gk2, popgen1, popgen2.
ModelSpec model_by_name(const std::string& id,
                        const std::optional<PopGenConfig>& popgen);

}  // namespace abcmc
