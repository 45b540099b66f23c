#include "abcmc/compat.hpp"

#include <cmath>
#include <limits>

#include "abcmc/numerics.hpp"

namespace abcmc {

namespace {

constexpr int kGridPointsPerDim = 512;
constexpr int kDescentRounds = 40;
constexpr double kGolden = 0.61803398874989484820;

double mean_gap(const ModelSpec& model, const std::vector<StatisticSpec>& specs,
                const SummaryVector& mu0, const std::vector<double>& theta) {
  const SummaryVector mu = model.mean_map(theta, specs);
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double d = mu[i] - mu0[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

// Golden-section step on one coordinate over [lo, hi].
void golden_section_coordinate(
    const ModelSpec& model, const std::vector<StatisticSpec>& specs,
    const SummaryVector& mu0, std::vector<double>& theta, std::size_t dim,
    double lo, double hi) {
  double a = lo;
  double b = hi;
  auto eval = [&](double x) {
    theta[dim] = x;
    return mean_gap(model, specs, mu0, theta);
  };
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = eval(x2);
    }
  }
  theta[dim] = f1 < f2 ? x1 : x2;
}

}  // namespace

ModelCompatibility mean_gap_infimum(const ModelSpec& model,
                                    const std::vector<StatisticSpec>& specs,
                                    const SummaryVector& mu0, double tol) {
  const std::size_t d = model.param_dim;
  if (model.param_box.size() != d) {
    throw ShapeError("model '" + model.name + "': parameter box size " +
                     std::to_string(model.param_box.size()) +
                     " does not match dimension " + std::to_string(d));
  }

  std::vector<double> best(d, 0.0);
  double best_gap = std::numeric_limits<double>::infinity();
  std::vector<double> theta(d, 0.0);

  // Dense scan; d is 1 or 2 here so the grid stays small.
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= kGridPointsPerDim;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t step = rem % kGridPointsPerDim;
      rem /= kGridPointsPerDim;
      const auto [lo, hi] = model.param_box[k];
      theta[k] = lo + (hi - lo) * static_cast<double>(step) /
                          static_cast<double>(kGridPointsPerDim - 1);
    }
    const double gap = mean_gap(model, specs, mu0, theta);
    if (gap < best_gap) {
      best_gap = gap;
      best = theta;
    }
  }

  theta = best;
  for (int round = 0; round < kDescentRounds; ++round) {
    for (std::size_t k = 0; k < d; ++k) {
      const auto [lo, hi] = model.param_box[k];
      // Shrinking bracket around the incumbent, never leaving the box.
      const double span = (hi - lo) / static_cast<double>(kGridPointsPerDim) *
                          std::pow(0.8, round);
      const double a = std::max(lo, theta[k] - 2.0 * span);
      const double b = std::min(hi, theta[k] + 2.0 * span);
      golden_section_coordinate(model, specs, mu0, theta, k, a, b);
    }
    const double gap = mean_gap(model, specs, mu0, theta);
    if (gap < best_gap) {
      best_gap = gap;
      best = theta;
    }
  }

  ModelCompatibility out;
  out.infimum = best_gap;
  out.argmin = best;
  out.compatible = best_gap < tol;
  return out;
}

CompatibilityReport compatibility_report(
    const ModelSpec& m1, const ModelSpec& m2,
    const std::vector<StatisticSpec>& specs, int true_model_index,
    const std::vector<double>& true_param, double tol) {
  if (true_model_index != 1 && true_model_index != 2) {
    throw DomainError("true model index must be 1 or 2");
  }
  if (specs.empty()) throw DomainError("empty statistic list");
  const ModelSpec& truth = true_model_index == 1 ? m1 : m2;

  CompatibilityReport report;
  report.mu0 = truth.mean_map(true_param, specs);
  report.model1 = mean_gap_infimum(m1, specs, report.mu0, tol);
  report.model2 = mean_gap_infimum(m2, specs, report.mu0, tol);
  report.discriminant =
      report.model1.compatible != report.model2.compatible;
  return report;
}

}  // namespace abcmc
