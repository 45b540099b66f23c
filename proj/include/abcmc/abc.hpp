#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "abcmc/models.hpp"
#include "abcmc/numerics.hpp"
#include "abcmc/rng.hpp"
#include "abcmc/stats.hpp"

namespace abcmc {

struct AbcConfig {
  // Total proposal budget, split evenly between the two models.
  std::size_t n_total = 10000;
  // Tolerance is this empirical quantile of the observed-to-row distances.
  double tolerance_quantile = 0.01;
  WeightedDistanceSpec distance;

  void validate() const;
};

struct ReferenceTableRow {
  int model_index = 0;  // 1 or 2
  std::vector<double> params;
  SummaryVector summary;
};

// Pre-simulated (model, parameter, summary) rows. Row r of model i draws
// from the stream seed.child(i).child(r), so the table is bit-identical
// for any worker count or scheduling order.
struct ReferenceTable {
  std::vector<StatisticSpec> specs;
  SeedSpec seed;
  std::size_t sample_size = 0;
  std::array<std::string, 2> model_names;
  std::array<std::size_t, 2> param_dims{1, 1};
  std::vector<ReferenceTableRow> rows;

  std::size_t dim() const { return specs.size(); }
  std::array<std::size_t, 2> counts_per_model() const;
  void validate() const;

  // Columnar CSV plus a JSON sidecar carrying specs, seed and shapes.
  void write_csv(const std::filesystem::path& csv_path,
                 const std::filesystem::path& sidecar_path) const;
  static ReferenceTable read_csv(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& sidecar_path);
};

ReferenceTable build_model_table(const ModelSpec& model, int model_index,
                                 const std::vector<StatisticSpec>& specs,
                                 std::size_t n_rows, std::size_t sample_size,
                                 const SeedSpec& seed);

// Equal row counts per model under one shared seed.
ReferenceTable build_reference_table(const ModelSpec& m1, const ModelSpec& m2,
                                     const std::vector<StatisticSpec>& specs,
                                     std::size_t n_per_model,
                                     std::size_t sample_size,
                                     const SeedSpec& seed);

struct AbcResult {
  double tolerance = 0.0;
  std::size_t accepted_total = 0;
  std::array<std::size_t, 2> accepted_per_model{0, 0};
  double posterior_prob_m1 = 0.0;
  double posterior_prob_m2 = 0.0;
  // Accepted-row odds for model 1; +infinity when model 2 is absent.
  double bayes_factor_12 = 0.0;
  std::array<std::vector<std::vector<double>>, 2> accepted_params;

  std::string to_json_string() const;
};

// Rejection step: accepts every row whose distance to the observed summary
// is <= the tolerance_quantile empirical quantile of all row distances
// (closed ball, so ties at the boundary are all kept).
AbcResult run_rejection(const ReferenceTable& table,
                        const SummaryVector& observed, const AbcConfig& cfg);

// L fresh datasets simulated at parameters resampled uniformly with
// replacement from the accepted set of the given model.
std::vector<SummaryVector> posterior_predictive_sample(
    const AbcResult& result, int model_index, const ModelSpec& model,
    const std::vector<StatisticSpec>& specs, std::size_t n_draws,
    std::size_t sample_size, const SeedSpec& seed);

}  // namespace abcmc
