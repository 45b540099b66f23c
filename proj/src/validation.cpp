#include "abcmc/validation.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "abcmc/format.hpp"

namespace abcmc {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTableTag = 11;
constexpr std::uint64_t kPredictiveTag = 23;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

MeanAndCov estimate_predictive_mean(const std::vector<SummaryVector>& draws) {
  if (draws.size() < 2) {
    throw DomainError("predictive mean needs at least two draws");
  }
  const std::size_t d = draws.front().size();
  for (const auto& row : draws) {
    if (row.size() != d) throw ShapeError("predictive draws have mixed dimensions");
  }
  const auto L = static_cast<double>(draws.size());

  MeanAndCov out;
  out.mean.assign(d, 0.0);
  for (const auto& row : draws) {
    for (std::size_t i = 0; i < d; ++i) out.mean[i] += row[i];
  }
  for (double& m : out.mean) m /= L;

  out.cov_of_mean = Matrix(d, d);
  for (const auto& row : draws) {
    for (std::size_t i = 0; i < d; ++i) {
      const double di = row[i] - out.mean[i];
      for (std::size_t j = i; j < d; ++j) {
        out.cov_of_mean(i, j) += di * (row[j] - out.mean[j]);
      }
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const double c = out.cov_of_mean(i, j) / (L - 1.0) / L;
      out.cov_of_mean(i, j) = c;
      out.cov_of_mean(j, i) = c;
    }
  }
  return out;
}

const char* validation_decision_name(ValidationDecision d) {
  return d == ValidationDecision::reject_h0_statistic_usable
             ? "reject_h0_statistic_usable"
             : "fail_to_reject_h0_statistic_inadequate";
}

ValidationReport common_mean_test(const SummaryVector& mu1, const Matrix& v1,
                                  const SummaryVector& mu2, const Matrix& v2,
                                  double alpha) {
  const std::size_t d = mu1.size();
  if (d == 0) throw DomainError("empty mean vectors");
  if (mu2.size() != d || v1.rows != d || v1.cols != d || v2.rows != d ||
      v2.cols != d) {
    throw ShapeError("common_mean_test: dimension mismatch");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie in (0,1)");
  }

  ValidationReport report;
  report.mu_hat_1 = mu1;
  report.mu_hat_2 = mu2;
  report.v1 = v1;
  report.v2 = v2;
  report.alpha = alpha;
  report.dof = d;

  Matrix total(d, d);
  for (std::size_t i = 0; i < d * d; ++i) {
    total.data[i] = v1.data[i] + v2.data[i];
  }
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < d; ++i) diff[i] = mu1[i] - mu2[i];

  const SpdSolution sol = solve_spd(total, diff);
  report.regularized = sol.regularized;
  double stat = 0.0;
  for (std::size_t i = 0; i < d; ++i) stat += diff[i] * sol.x[i];
  report.statistic = std::max(0.0, stat);
  report.p_value = chi_square_sf(report.statistic, static_cast<int>(d));
  report.decision = report.p_value < alpha
                        ? ValidationDecision::reject_h0_statistic_usable
                        : ValidationDecision::fail_to_reject_h0_statistic_inadequate;
  return report;
}

ValidationReport validate_with_tables(
    const ReferenceTable& table_m1, const ReferenceTable& table_m2,
    const ModelSpec& m1, const ModelSpec& m2,
    const std::vector<StatisticSpec>& specs, const Sample& observed,
    const AbcConfig& cfg, std::size_t n_predictive, double alpha,
    const SeedSpec& seed) {
  cfg.validate();
  const SummaryVector observed_summary = compose_statistics(specs, observed);
  const std::size_t n = observed.size();

  const AbcResult res1 = run_rejection(table_m1, observed_summary, cfg);
  const AbcResult res2 = run_rejection(table_m2, observed_summary, cfg);

  const auto draws1 = posterior_predictive_sample(
      res1, 1, m1, specs, n_predictive, n, seed.child(kPredictiveTag).child(1));
  const auto draws2 = posterior_predictive_sample(
      res2, 2, m2, specs, n_predictive, n, seed.child(kPredictiveTag).child(2));

  const MeanAndCov mc1 = estimate_predictive_mean(draws1);
  const MeanAndCov mc2 = estimate_predictive_mean(draws2);

  ValidationReport report =
      common_mean_test(mc1.mean, mc1.cov_of_mean, mc2.mean, mc2.cov_of_mean, alpha);
  report.seed = seed;
  report.tolerance_m1 = res1.tolerance;
  report.tolerance_m2 = res2.tolerance;
  report.accepted_m1 = res1.accepted_per_model[0];
  report.accepted_m2 = res2.accepted_per_model[1];
  report.predictive_draws = n_predictive;
  return report;
}

ValidationReport validate_statistic_choice(
    const ModelSpec& m1, const ModelSpec& m2,
    const std::vector<StatisticSpec>& specs, const Sample& observed,
    const AbcConfig& cfg, std::size_t n_predictive, double alpha,
    const SeedSpec& seed) {
  cfg.validate();
  const std::size_t per_model = cfg.n_total / 2;
  const std::size_t n = observed.size();
  const ReferenceTable table1 = build_model_table(
      m1, 1, specs, per_model, n, seed.child(kTableTag).child(1));
  const ReferenceTable table2 = build_model_table(
      m2, 2, specs, per_model, n, seed.child(kTableTag).child(2));
  return validate_with_tables(table1, table2, m1, m2, specs, observed, cfg,
                              n_predictive, alpha, seed);
}

std::string ValidationReport::to_json_string() const {
  json j;
  j["mu_hat_1"] = mu_hat_1;
  j["mu_hat_2"] = mu_hat_2;
  j["v1"] = matrix_to_json(v1);
  j["v2"] = matrix_to_json(v2);
  j["statistic"] = statistic;
  j["dof"] = dof;
  j["p_value"] = p_value;
  j["regularized"] = regularized;
  j["alpha"] = alpha;
  j["decision"] = validation_decision_name(decision);
  j["provenance"] = {
      {"seed", {{"root_seed", seed.root_seed}, {"stream_id", seed.stream_id}}},
      {"tolerance_m1", tolerance_m1},
      {"tolerance_m2", tolerance_m2},
      {"accepted_m1", accepted_m1},
      {"accepted_m2", accepted_m2},
      {"predictive_draws", predictive_draws},
  };
  return j.dump(2) + "\n";
}

}  // namespace abcmc
