#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "abcmc/errors.hpp"
#include "abcmc/models.hpp"
#include "abcmc/numerics.hpp"
#include "abcmc/rng.hpp"
#include "abcmc/stats.hpp"

using namespace abcmc;

namespace {

double map_of(const ModelSpec& m, const std::vector<double>& theta,
              const std::string& stat) {
  return m.mean_map(theta, {StatisticSpec::parse(stat)})[0];
}

// Gaussian raw even moments by the Hermite recursion:
// E (theta + Z)^k expanded over binomial(k, 2j) (2j-1)!! theta^(k-2j).
double gaussian_raw_moment(double theta, int k) {
  auto binom = [](int n, int r) {
    double acc = 1.0;
    for (int i = 0; i < r; ++i) acc = acc * (n - i) / (i + 1);
    return acc;
  };
  double acc = 0.0;
  for (int j = 0; 2 * j <= k; ++j) {
    double dfact = 1.0;
    for (int i = 2 * j - 1; i > 1; i -= 2) dfact *= i;
    acc += binom(k, 2 * j) * dfact * std::pow(theta, k - 2 * j);
  }
  return acc;
}

// Laplace(theta, b) raw even moments via central moments (2j)! b^(2j).
double laplace_raw_moment(double theta, int k, double b) {
  auto binom = [](int n, int r) {
    double acc = 1.0;
    for (int i = 0; i < r; ++i) acc = acc * (n - i) / (i + 1);
    return acc;
  };
  auto fact = [](int n) {
    double acc = 1.0;
    for (int i = 2; i <= n; ++i) acc *= i;
    return acc;
  };
  double acc = 0.0;
  for (int j = 0; 2 * j <= k; ++j) {
    acc += binom(k, 2 * j) * fact(2 * j) * std::pow(b, 2 * j) *
           std::pow(theta, k - 2 * j);
  }
  return acc;
}

}  // namespace

TEST_CASE("gaussian model: prior, simulator moments, mean maps") {
  const ModelSpec m = gaussian_model(0.0, 4.0);
  CHECK(m.name == "gaussian");
  CHECK(m.param_dim == 1);

  RngStream rng(SeedSpec{1, 0});
  const int n = 20000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = m.sample_prior(rng)[0];
    sum += t;
    sumsq += t * t;
  }
  CHECK(std::fabs(sum / n) < 5.0 * 2.0 / std::sqrt(n));
  CHECK(std::fabs(sumsq / n - 4.0) < 5.0 * 4.0 * std::sqrt(2.0 / n));

  const Sample data = m.simulate({0.7}, 50000, rng);
  CHECK(stat_mean(data) == doctest::Approx(0.7).epsilon(0.05));
  CHECK(stat_variance(data) == doctest::Approx(1.0).epsilon(0.05));

  const double theta = 0.7;
  CHECK(map_of(m, {theta}, "mean") == theta);
  CHECK(map_of(m, {theta}, "median") == theta);
  CHECK(map_of(m, {theta}, "variance") == 1.0);
  CHECK(map_of(m, {theta}, "mad") ==
        doctest::Approx(std_normal_quantile(0.75)).epsilon(1e-12));
  CHECK(map_of(m, {theta}, "moment4") ==
        doctest::Approx(gaussian_raw_moment(theta, 4)).epsilon(1e-12));
  CHECK(map_of(m, {theta}, "moment6") ==
        doctest::Approx(gaussian_raw_moment(theta, 6)).epsilon(1e-12));
  // At theta=0 the classic double factorials appear.
  CHECK(map_of(m, {0.0}, "moment4") == doctest::Approx(3.0));
  CHECK(map_of(m, {0.0}, "moment6") == doctest::Approx(15.0));
}

TEST_CASE("laplace model: unit variance scaling and mean maps") {
  const ModelSpec m = laplace_model(0.0, 4.0);
  CHECK(m.name == "laplace");
  const double b = 1.0 / std::sqrt(2.0);

  RngStream rng(SeedSpec{2, 0});
  const Sample data = m.simulate({-0.4}, 50000, rng);
  CHECK(stat_mean(data) == doctest::Approx(-0.4).epsilon(0.08));
  CHECK(stat_variance(data) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(stat_median(data) == doctest::Approx(-0.4).epsilon(0.1));

  const double theta = 0.7;
  CHECK(map_of(m, {theta}, "mean") == theta);
  CHECK(map_of(m, {theta}, "median") == theta);
  CHECK(map_of(m, {theta}, "variance") == 1.0);
  CHECK(map_of(m, {theta}, "mad") == doctest::Approx(b * std::log(2.0)).epsilon(1e-12));
  CHECK(map_of(m, {theta}, "moment4") ==
        doctest::Approx(laplace_raw_moment(theta, 4, b)).epsilon(1e-12));
  CHECK(map_of(m, {theta}, "moment6") ==
        doctest::Approx(laplace_raw_moment(theta, 6, b)).epsilon(1e-12));
  CHECK(map_of(m, {0.0}, "moment4") == doctest::Approx(6.0));
  CHECK(map_of(m, {0.0}, "moment6") == doctest::Approx(90.0));

  // Monte Carlo cross-check of the sixth moment at a nonzero theta: the
  // analytic map must sit inside five standard errors.
  const double t = 0.5;
  const int reps = 400000;
  RngStream mc(SeedSpec{2, 9});
  double acc = 0.0, accsq = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double x = mc.laplace(t, b);
    const double x6 = x * x * x * x * x * x;
    acc += x6;
    accsq += x6 * x6;
  }
  const double mean6 = acc / reps;
  const double se = std::sqrt((accsq / reps - mean6 * mean6) / reps);
  CHECK(std::fabs(mean6 - laplace_raw_moment(t, 6, b)) < 5.0 * se);
}

TEST_CASE("mad maps against long-run simulation") {
  RngStream rng(SeedSpec{3, 0});
  const ModelSpec gauss = gaussian_model(0.0, 4.0);
  const ModelSpec lap = laplace_model(0.0, 4.0);
  const Sample gd = gauss.simulate({0.0}, 200000, rng);
  const Sample ld = lap.simulate({0.0}, 200000, rng);
  CHECK(stat_mad(gd) == doctest::Approx(0.6744897501960817).epsilon(0.01));
  CHECK(stat_mad(ld) == doctest::Approx(0.4901290717342736).epsilon(0.01));
}

TEST_CASE("g-and-k quantile function: anchors, skew limits, monotonicity") {
  // At g=0 the skew factor drops out: Q(p) = z (1 + z^2)^k.
  const double z10 = std_normal_quantile(0.10);
  CHECK(gk_quantile(0.5, 0.0, 1.0, 0.0, 2.0) == doctest::Approx(0.0));
  CHECK(gk_quantile(0.1, 0.0, 1.0, 0.0, 2.0) ==
        doctest::Approx(z10 * std::pow(1.0 + z10 * z10, 2.0)).epsilon(1e-12));
  CHECK(gk_quantile(0.9, 0.0, 1.0, 0.0, 2.0) ==
        doctest::Approx(-gk_quantile(0.1, 0.0, 1.0, 0.0, 2.0)).epsilon(1e-12));
  // Location and scale act affinely.
  CHECK(gk_quantile(0.3, 2.0, 3.0, 1.0, 0.5) ==
        doctest::Approx(2.0 + 3.0 * gk_quantile(0.3, 0.0, 1.0, 1.0, 0.5)));
  // The asymptotic skew factor spans (0.2, 1.8): at large z the factor
  // tends to 1 + 0.8 = 1.8, at strongly negative z to 0.2.
  const double zbig = std_normal_quantile(0.999);
  const double plus = gk_quantile(0.999, 0.0, 1.0, 50.0, 0.0);
  CHECK(plus == doctest::Approx(1.8 * zbig).epsilon(1e-3));
  const double minus = gk_quantile(0.001, 0.0, 1.0, 50.0, 0.0);
  CHECK(minus == doctest::Approx(-0.2 * zbig).epsilon(1e-3));

  // Increasing for k >= 0 at any skew, and for the whole k range when
  // symmetric; negative k with positive g dents the curve below the median.
  RngStream rng(SeedSpec{4, 0});
  for (int rep = 0; rep < 1000; ++rep) {
    const bool symmetric = rep % 2 == 0;
    const double g = symmetric ? 0.0 : rng.uniform(0.0, 4.0);
    const double k =
        symmetric ? rng.uniform(-0.5, 5.0) : rng.uniform(0.0, 5.0);
    const double p1 = rng.uniform(0.001, 0.999);
    const double p2 = rng.uniform(0.001, 0.999);
    const double lo = std::min(p1, p2), hi = std::max(p1, p2);
    CHECK(gk_quantile(lo, 0.0, 1.0, g, k) <=
          gk_quantile(hi, 0.0, 1.0, g, k) + 1e-12);
  }
  CHECK(gk_quantile(0.02, 0.0, 1.0, 0.5, -0.45) >
        gk_quantile(0.06, 0.0, 1.0, 0.5, -0.45));
}

TEST_CASE("g-and-k models: simulation follows the quantile function") {
  const ModelSpec m1 = gk_quantile_model(GkVariant::g_fixed_zero);
  const ModelSpec m2 = gk_quantile_model(GkVariant::g_free);
  CHECK(m1.name == "gk1");
  CHECK(m1.param_dim == 1);
  CHECK(m2.name == "gk2");
  CHECK(m2.param_dim == 2);

  RngStream rng(SeedSpec{5, 0});
  const Sample s1 = m1.simulate({2.0}, 200000, rng);
  // Empirical quantiles of a big sample land near the quantile function.
  CHECK(stat_quantile(s1, 0.10) ==
        doctest::Approx(gk_quantile(0.10, 0.0, 1.0, 0.0, 2.0)).epsilon(0.05));
  CHECK(stat_quantile(s1, 0.90) ==
        doctest::Approx(gk_quantile(0.90, 0.0, 1.0, 0.0, 2.0)).epsilon(0.05));

  const Sample s2 = m2.simulate({1.0, 2.0}, 200000, rng);
  CHECK(stat_quantile(s2, 0.10) ==
        doctest::Approx(gk_quantile(0.10, 0.0, 1.0, 1.0, 2.0)).epsilon(0.05));
  CHECK(stat_quantile(s2, 0.90) ==
        doctest::Approx(gk_quantile(0.90, 0.0, 1.0, 1.0, 2.0)).epsilon(0.05));

  // Mean maps evaluate the quantile function exactly.
  CHECK(map_of(m1, {2.0}, "q10") ==
        doctest::Approx(gk_quantile(0.10, 0.0, 1.0, 0.0, 2.0)));
  CHECK(map_of(m2, {1.0, 2.0}, "q10") ==
        doctest::Approx(gk_quantile(0.10, 0.0, 1.0, 1.0, 2.0)));
  CHECK(map_of(m1, {2.0}, "q10") == doctest::Approx(-8.948).epsilon(1e-3));
  CHECK(map_of(m2, {1.0, 2.0}, "q10") == doctest::Approx(-4.90).epsilon(1e-2));
  CHECK(map_of(m2, {1.0, 2.0}, "q90") == doctest::Approx(12.99).epsilon(1e-2));

  // Priors stay inside the boxes.
  for (int i = 0; i < 1000; ++i) {
    const auto t1 = m1.sample_prior(rng);
    CHECK(t1[0] >= -0.5);
    CHECK(t1[0] <= 5.0);
    const auto t2 = m2.sample_prior(rng);
    CHECK(t2[0] >= 0.0);
    CHECK(t2[0] <= 4.0);
    CHECK(t2[1] >= -0.5);
    CHECK(t2[1] <= 5.0);
  }
}

TEST_CASE("population genetics models: maps follow the divergence table") {
  const PopGenConfig cfg;  // ne 60, t_recent 30, t_ancient 60
  const ModelSpec m1 = popgen_model(cfg, 1e-4, 0.01);
  CHECK(m1.param_dim == 1);
  const double theta = 0.005;
  // Population 3 splits from population 1: pairs (1,3) separate at the
  // recent time, pairs (1,2) and (2,3) at the ancient one.
  CHECK(map_of(m1, {theta}, "dmu13") == doctest::Approx(2 * theta * 30.0));
  CHECK(map_of(m1, {theta}, "dmu12") == doctest::Approx(2 * theta * 60.0));
  CHECK(map_of(m1, {theta}, "dmu23") == doctest::Approx(2 * theta * 60.0));

  PopGenConfig cfg2 = cfg;
  cfg2.topology = Topology::pop3_from_pop2;
  const ModelSpec m2 = popgen_model(cfg2, 1e-4, 0.01);
  CHECK(map_of(m2, {theta}, "dmu23") == doctest::Approx(2 * theta * 30.0));
  CHECK(map_of(m2, {theta}, "dmu12") == doctest::Approx(2 * theta * 60.0));
  CHECK(map_of(m2, {theta}, "dmu13") == doctest::Approx(2 * theta * 60.0));

  // No scalar maps on population models.
  CHECK(m1.mean_component({theta}, StatisticSpec::parse("mean")) ==
        std::nullopt);
  CHECK_THROWS_AS(m1.mean_map({theta}, {StatisticSpec::parse("mad")}),
                  UnsupportedError);

  RngStream rng(SeedSpec{6, 0});
  for (int i = 0; i < 1000; ++i) {
    const double t = m1.sample_prior(rng)[0];
    CHECK(t >= 1e-4);
    CHECK(t <= 0.01);
  }
  const Sample data = m1.simulate({theta}, 12, rng);
  CHECK(data.microsat().n_loci() == 12);
  CHECK(data.microsat().copies_per_population() == 100);
}

TEST_CASE("model_by_name resolves ids and rejects unknowns") {
  const std::optional<PopGenConfig> none;
  CHECK(model_by_name("gaussian", none).name == "gaussian");
  CHECK(model_by_name("laplace", none).name == "laplace");
  CHECK(model_by_name("gk1", none).name == "gk1");
  CHECK(model_by_name("gk2", none).name == "gk2");
  CHECK(model_by_name("popgen1", none).name == "popgen1");
  CHECK(model_by_name("popgen2", none).name == "popgen2");
  CHECK_THROWS_AS(model_by_name("cauchy", none), DomainError);

  PopGenConfig custom;
  custom.n_diploid = 4;
  const ModelSpec m = model_by_name("popgen2", custom);
  RngStream rng(SeedSpec{7, 0});
  const Sample s = m.simulate({0.005}, 3, rng);
  CHECK(s.microsat().copies_per_population() == 8);
}

TEST_CASE("mean map errors carry shape information") {
  const ModelSpec m = gaussian_model(0.0, 4.0);
  CHECK_THROWS_AS(m.mean_map({0.0, 1.0}, {StatisticSpec::parse("mean")}),
                  ShapeError);
  CHECK(m.has_mean_map({StatisticSpec::parse("mean")}));
  CHECK_FALSE(m.has_mean_map({StatisticSpec::parse("q10")}));
}
