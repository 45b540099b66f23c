#include "abcmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abcmc/numerics.hpp"

namespace abcmc {

namespace {

std::vector<double> sorted_copy(const std::vector<double>& xs) {
  std::vector<double> copy = xs;
  std::sort(copy.begin(), copy.end());
  return copy;
}

double median_of_sorted(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double population_mean_allele(const std::vector<int>& copies) {
  double acc = 0.0;
  for (int a : copies) acc += static_cast<double>(a);
  return acc / static_cast<double>(copies.size());
}

}  // namespace

std::size_t MicrosatDataset::copies_per_population() const {
  if (loci.empty()) return 0;
  return loci.front()[0].size();
}

void MicrosatDataset::validate() const {
  if (loci.empty()) throw DomainError("microsat dataset has no loci");
  const std::size_t copies = loci.front()[0].size();
  if (copies == 0) throw DomainError("microsat dataset has no gene copies");
  for (const auto& locus : loci) {
    for (const auto& pop : locus) {
      if (pop.size() != copies) {
        throw ShapeError("microsat dataset is not rectangular");
      }
    }
  }
}

const std::vector<double>& Sample::scalar() const {
  if (!is_scalar()) {
    throw DomainError("scalar statistic applied to a microsatellite sample");
  }
  return std::get<std::vector<double>>(data);
}

const MicrosatDataset& Sample::microsat() const {
  if (is_scalar()) {
    throw DomainError("population statistic applied to a scalar sample");
  }
  return std::get<MicrosatDataset>(data);
}

std::size_t Sample::size() const {
  return is_scalar() ? scalar().size() : microsat().n_loci();
}

double stat_mean(const Sample& s) {
  const auto& xs = s.scalar();
  if (xs.empty()) throw DomainError("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

double stat_median(const Sample& s) {
  const auto& xs = s.scalar();
  if (xs.empty()) throw DomainError("median of an empty sample");
  return median_of_sorted(sorted_copy(xs));
}

double stat_variance(const Sample& s) {
  const auto& xs = s.scalar();
  if (xs.size() < 2) throw DomainError("variance needs at least two values");
  const double m = stat_mean(s);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

double stat_mad(const Sample& s) {
  const auto& xs = s.scalar();
  if (xs.empty()) throw DomainError("mad of an empty sample");
  const double med = median_of_sorted(sorted_copy(xs));
  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = std::fabs(xs[i] - med);
  std::sort(dev.begin(), dev.end());
  return median_of_sorted(dev);
}

double stat_moment(const Sample& s, int k) {
  const auto& xs = s.scalar();
  if (xs.empty()) throw DomainError("moment of an empty sample");
  if (k < 1) throw DomainError("moment order must be >= 1");
  double acc = 0.0;
  for (double x : xs) acc += std::pow(x, k);
  return acc / static_cast<double>(xs.size());
}

double stat_quantile(const Sample& s, double p) {
  const auto& xs = s.scalar();
  return empirical_quantile(xs, p);
}

double stat_delta_mu_sq(const Sample& s, int pop_a, int pop_b) {
  if (pop_a < 1 || pop_a > 3 || pop_b < 1 || pop_b > 3 || pop_a == pop_b) {
    throw DomainError("dmu populations must be distinct and in 1..3");
  }
  const auto& d = s.microsat();
  d.validate();
  double acc = 0.0;
  for (const auto& locus : d.loci) {
    const double diff = population_mean_allele(locus[pop_a - 1]) -
                        population_mean_allele(locus[pop_b - 1]);
    acc += diff * diff;
  }
  return acc / static_cast<double>(d.n_loci());
}

StatisticSpec StatisticSpec::parse(const std::string& name) {
  StatisticSpec spec;
  if (name == "mean") {
    spec.kind = Kind::mean;
    return spec;
  }
  if (name == "median") {
    spec.kind = Kind::median;
    return spec;
  }
  if (name == "variance") {
    spec.kind = Kind::variance;
    return spec;
  }
  if (name == "mad") {
    spec.kind = Kind::mad;
    return spec;
  }
  if (name.rfind("moment", 0) == 0 && name.size() > 6 &&
      name.find_first_not_of("0123456789", 6) == std::string::npos) {
    spec.kind = Kind::moment;
    try {
      spec.moment_order = std::stoi(name.substr(6));
    } catch (const std::exception&) {
      throw DomainError("bad statistic '" + name + "'");
    }
    if (spec.moment_order < 1) throw DomainError("bad statistic '" + name + "'");
    return spec;
  }
  if (name.size() >= 2 && name[0] == 'q' &&
      name.find_first_not_of("0123456789", 1) == std::string::npos) {
    spec.kind = Kind::quantile;
    int pct = 0;
    try {
      pct = std::stoi(name.substr(1));
    } catch (const std::exception&) {
      throw DomainError("bad statistic '" + name + "'");
    }
    spec.quantile_level = pct / 100.0;
    if (!(spec.quantile_level > 0.0 && spec.quantile_level <= 1.0)) {
      throw DomainError("bad statistic '" + name + "'");
    }
    return spec;
  }
  if (name.size() == 5 && name.rfind("dmu", 0) == 0) {
    spec.kind = Kind::delta_mu_sq;
    spec.pop_a = name[3] - '0';
    spec.pop_b = name[4] - '0';
    if (spec.pop_a < 1 || spec.pop_a > 3 || spec.pop_b < 1 || spec.pop_b > 3 ||
        spec.pop_a == spec.pop_b) {
      throw DomainError("bad statistic '" + name + "'");
    }
    return spec;
  }
  throw DomainError("unknown statistic '" + name + "'");
}

std::string StatisticSpec::name() const {
  switch (kind) {
    case Kind::mean:
      return "mean";
    case Kind::median:
      return "median";
    case Kind::variance:
      return "variance";
    case Kind::mad:
      return "mad";
    case Kind::moment:
      return "moment" + std::to_string(moment_order);
    case Kind::quantile: {
      const int pct = static_cast<int>(std::lround(quantile_level * 100.0));
      return "q" + std::to_string(pct);
    }
    case Kind::delta_mu_sq:
      return "dmu" + std::to_string(pop_a) + std::to_string(pop_b);
  }
  throw DomainError("unreachable statistic kind");
}

double StatisticSpec::evaluate(const Sample& s) const {
  switch (kind) {
    case Kind::mean:
      return stat_mean(s);
    case Kind::median:
      return stat_median(s);
    case Kind::variance:
      return stat_variance(s);
    case Kind::mad:
      return stat_mad(s);
    case Kind::moment:
      return stat_moment(s, moment_order);
    case Kind::quantile:
      return stat_quantile(s, quantile_level);
    case Kind::delta_mu_sq:
      return stat_delta_mu_sq(s, pop_a, pop_b);
  }
  throw DomainError("unreachable statistic kind");
}

std::vector<StatisticSpec> parse_statistic_list(
    const std::vector<std::string>& names) {
  std::vector<StatisticSpec> specs;
  specs.reserve(names.size());
  for (const auto& n : names) specs.push_back(StatisticSpec::parse(n));
  return specs;
}

std::string statistic_set_name(const std::vector<StatisticSpec>& specs) {
  std::string out;
  for (const auto& s : specs) {
    if (!out.empty()) out += '+';
    out += s.name();
  }
  return out;
}

SummaryVector compose_statistics(const std::vector<StatisticSpec>& specs,
                                 const Sample& sample) {
  if (specs.empty()) throw DomainError("empty statistic list");
  SummaryVector out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    try {
      out.push_back(spec.evaluate(sample));
    } catch (const ShapeError& e) {
      throw ShapeError("statistic '" + spec.name() + "': " + e.what());
    } catch (const DomainError& e) {
      throw DomainError("statistic '" + spec.name() + "': " + e.what());
    }
  }
  return out;
}

}  // namespace abcmc
