#include "abcmc/models.hpp"

#include <cmath>

#include "abcmc/numerics.hpp"

namespace abcmc {

bool ModelSpec::has_mean_map(const std::vector<StatisticSpec>& specs) const {
  if (!mean_component) return false;
  const std::vector<double> probe(param_dim, 0.5);
  for (const auto& spec : specs) {
    if (!mean_component(probe, spec).has_value()) return false;
  }
  return true;
}

SummaryVector ModelSpec::mean_map(const std::vector<double>& theta,
                                  const std::vector<StatisticSpec>& specs) const {
  if (theta.size() != param_dim) {
    throw ShapeError("model '" + name + "': parameter dimension " +
                     std::to_string(theta.size()) + ", expected " +
                     std::to_string(param_dim));
  }
  SummaryVector out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    std::optional<double> v =
        mean_component ? mean_component(theta, spec) : std::nullopt;
    if (!v.has_value()) {
      throw UnsupportedError("model '" + name +
                             "' has no mean map for statistic '" +
                             spec.name() + "'");
    }
    out.push_back(*v);
  }
  return out;
}

namespace {

constexpr double kLaplaceScale = 0.70710678118654752440;  // 1/sqrt(2)

std::function<std::vector<double>(RngStream&)> normal_prior(double mean,
                                                            double var) {
  const double sd = std::sqrt(var);
  return [mean, sd](RngStream& rng) {
    return std::vector<double>{mean + sd * rng.normal()};
  };
}

}  // namespace

ModelSpec gaussian_model(double prior_mean, double prior_var) {
  if (prior_var <= 0.0) throw DomainError("prior variance must be positive");
  ModelSpec m;
  m.name = "gaussian";
  m.param_dim = 1;
  const double half_width = 6.0 * std::sqrt(prior_var);
  m.param_box = {{prior_mean - half_width, prior_mean + half_width}};
  m.sample_prior = normal_prior(prior_mean, prior_var);
  m.simulate = [](const std::vector<double>& theta, std::size_t n,
                  RngStream& rng) {
    std::vector<double> ys(n);
    for (auto& y : ys) y = theta[0] + rng.normal();
    return Sample::from_values(std::move(ys));
  };
  m.mean_component = [](const std::vector<double>& theta,
                        const StatisticSpec& spec) -> std::optional<double> {
    const double t = theta[0];
    switch (spec.kind) {
      case StatisticSpec::Kind::mean:
      case StatisticSpec::Kind::median:
        return t;
      case StatisticSpec::Kind::variance:
        return 1.0;
      case StatisticSpec::Kind::mad:
        return std_normal_quantile(0.75);
      case StatisticSpec::Kind::moment:
        if (spec.moment_order == 4) return t * t * t * t + 6.0 * t * t + 3.0;
        if (spec.moment_order == 6) {
          const double t2 = t * t;
          return t2 * t2 * t2 + 15.0 * t2 * t2 + 45.0 * t2 + 15.0;
        }
        return std::nullopt;
      default:
        return std::nullopt;
    }
  };
  return m;
}

ModelSpec laplace_model(double prior_mean, double prior_var) {
  if (prior_var <= 0.0) throw DomainError("prior variance must be positive");
  ModelSpec m;
  m.name = "laplace";
  m.param_dim = 1;
  const double half_width = 6.0 * std::sqrt(prior_var);
  m.param_box = {{prior_mean - half_width, prior_mean + half_width}};
  m.sample_prior = normal_prior(prior_mean, prior_var);
  m.simulate = [](const std::vector<double>& theta, std::size_t n,
                  RngStream& rng) {
    std::vector<double> ys(n);
    for (auto& y : ys) y = rng.laplace(theta[0], kLaplaceScale);
    return Sample::from_values(std::move(ys));
  };
  m.mean_component = [](const std::vector<double>& theta,
                        const StatisticSpec& spec) -> std::optional<double> {
    const double t = theta[0];
    switch (spec.kind) {
      case StatisticSpec::Kind::mean:
      case StatisticSpec::Kind::median:
        return t;
      case StatisticSpec::Kind::variance:
        return 1.0;
      case StatisticSpec::Kind::mad:
        // Half-width of the central 50% mass: b ln 2.
        return kLaplaceScale * std::log(2.0);
      case StatisticSpec::Kind::moment:
        // Central even moments are (2k)! b^(2k): 6 for k=2, 90 for k=3.
        if (spec.moment_order == 4) return t * t * t * t + 6.0 * t * t + 6.0;
        if (spec.moment_order == 6) {
          const double t2 = t * t;
          return t2 * t2 * t2 + 15.0 * t2 * t2 + 90.0 * t2 + 90.0;
        }
        return std::nullopt;
      default:
        return std::nullopt;
    }
  };
  return m;
}

double gk_quantile(double p, double a, double b, double g, double k) {
  const double z = std_normal_quantile(p);
  double skew = 1.0;
  if (g != 0.0) {
    const double e = std::exp(-g * z);
    skew = 1.0 + 0.8 * (1.0 - e) / (1.0 + e);
  }
  return a + b * skew * std::pow(1.0 + z * z, k) * z;
}

ModelSpec gk_quantile_model(GkVariant variant) {
  ModelSpec m;
  if (variant == GkVariant::g_fixed_zero) {
    m.name = "gk1";
    m.param_dim = 1;
    m.param_box = {{-0.5, 5.0}};
    m.sample_prior = [](RngStream& rng) {
      return std::vector<double>{rng.uniform(-0.5, 5.0)};
    };
  } else {
    m.name = "gk2";
    m.param_dim = 2;
    m.param_box = {{0.0, 4.0}, {-0.5, 5.0}};
    m.sample_prior = [](RngStream& rng) {
      const double g = rng.uniform(0.0, 4.0);
      const double k = rng.uniform(-0.5, 5.0);
      return std::vector<double>{g, k};
    };
  }
  m.simulate = [variant](const std::vector<double>& theta, std::size_t n,
                         RngStream& rng) {
    const double g = variant == GkVariant::g_fixed_zero ? 0.0 : theta[0];
    const double k = variant == GkVariant::g_fixed_zero ? theta[0] : theta[1];
    std::vector<double> ys(n);
    for (auto& y : ys) y = gk_quantile(rng.uniform01(), 0.0, 1.0, g, k);
    return Sample::from_values(std::move(ys));
  };
  m.mean_component = [variant](const std::vector<double>& theta,
                               const StatisticSpec& spec)
      -> std::optional<double> {
    if (spec.kind != StatisticSpec::Kind::quantile) return std::nullopt;
    const double g = variant == GkVariant::g_fixed_zero ? 0.0 : theta[0];
    const double k = variant == GkVariant::g_fixed_zero ? theta[0] : theta[1];
    return gk_quantile(spec.quantile_level, 0.0, 1.0, g, k);
  };
  return m;
}

ModelSpec popgen_model(const PopGenConfig& cfg, double prior_lo,
                       double prior_hi) {
  cfg.validate();
  if (!(0.0 < prior_lo && prior_lo < prior_hi)) {
    throw DomainError("popgen prior bounds must satisfy 0 < lo < hi");
  }
  ModelSpec m;
  m.name = cfg.topology == Topology::pop3_from_pop1 ? "popgen1" : "popgen2";
  m.param_dim = 1;
  m.param_box = {{prior_lo, prior_hi}};
  m.sample_prior = [prior_lo, prior_hi](RngStream& rng) {
    return std::vector<double>{rng.uniform(prior_lo, prior_hi)};
  };
  m.simulate = [cfg](const std::vector<double>& theta, std::size_t n_loci,
                     RngStream& rng) {
    return Sample::from_microsat(
        simulate_microsat_dataset(cfg, theta[0], n_loci, rng));
  };
  m.mean_component = [cfg](const std::vector<double>& theta,
                           const StatisticSpec& spec)
      -> std::optional<double> {
    if (spec.kind != StatisticSpec::Kind::delta_mu_sq) return std::nullopt;
    const int lo = std::min(spec.pop_a, spec.pop_b);
    const int hi = std::max(spec.pop_a, spec.pop_b);
    // Divergence time of the pair: populations 1 and 2 always split at
    // t_ancient; population 3 splits from its source at t_recent and from
    // the remaining population at t_ancient.
    double split = cfg.t_ancient;
    if (hi == 3) {
      const int source = cfg.topology == Topology::pop3_from_pop1 ? 1 : 2;
      split = lo == source ? cfg.t_recent : cfg.t_ancient;
    }
    return 2.0 * theta[0] * split;
  };
  return m;
}

ModelSpec model_by_name(const std::string& id,
                        const std::optional<PopGenConfig>& popgen) {
  if (id == "gaussian") return gaussian_model(0.0, 4.0);
  if (id == "laplace") return laplace_model(0.0, 4.0);
  if (id == "gk1") return gk_quantile_model(GkVariant::g_fixed_zero);
  if (id == "gk2") return gk_quantile_model(GkVariant::g_free);
  if (id == "popgen1" || id == "popgen2") {
    PopGenConfig cfg = popgen.value_or(PopGenConfig{});
    cfg.topology =
        id == "popgen1" ? Topology::pop3_from_pop1 : Topology::pop3_from_pop2;
    return popgen_model(cfg, 0.0001, 0.01);
  }
  throw DomainError("unknown model id '" + id + "'");
}

}  // namespace abcmc
