#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "abcmc/errors.hpp"

namespace abcmc {

using SummaryVector = std::vector<double>;

// Microsatellite allele sizes for three populations:
// loci[l][p] holds the allele size of each sampled gene copy.
struct MicrosatDataset {
  std::vector<std::array<std::vector<int>, 3>> loci;

  std::size_t n_loci() const { return loci.size(); }
  std::size_t copies_per_population() const;
  // Every locus must carry the same positive number of copies per population.
  void validate() const;
};

// One observed or simulated dataset: either n scalar values or a
// microsatellite dataset whose size is its locus count.
struct Sample {
  std::variant<std::vector<double>, MicrosatDataset> data;

  bool is_scalar() const {
    return std::holds_alternative<std::vector<double>>(data);
  }
  const std::vector<double>& scalar() const;
  const MicrosatDataset& microsat() const;
  std::size_t size() const;

  static Sample from_values(std::vector<double> values) {
    return Sample{std::move(values)};
  }
  static Sample from_microsat(MicrosatDataset d) { return Sample{std::move(d)}; }
};

double stat_mean(const Sample& s);
// Midpoint of the two central order statistics when n is even.
double stat_median(const Sample& s);
// Divisor n - 1; requires n >= 2.
double stat_variance(const Sample& s);
// Median absolute deviation about the median.
double stat_mad(const Sample& s);
// Raw (uncentered) moment of order k >= 1.
double stat_moment(const Sample& s, int k);
// Order statistic x_(ceil(p * n)), p in (0, 1].
double stat_quantile(const Sample& s, double p);
// Squared difference of mean allele size between two populations,
// averaged over loci. Populations are numbered 1..3.
double stat_delta_mu_sq(const Sample& s, int pop_a, int pop_b);

// Name-addressable statistic: mean, median, variance, mad, moment4,
// moment6, q10, q40, q60, q90, dmu12, dmu13, dmu23 (and the obvious
// generalizations momentK, qNN, dmuJK).
struct StatisticSpec {
  enum class Kind { mean, median, variance, mad, moment, quantile, delta_mu_sq };

  Kind kind = Kind::mean;
  int moment_order = 0;
  double quantile_level = 0.0;
  int pop_a = 0;
  int pop_b = 0;

  static StatisticSpec parse(const std::string& name);
  std::string name() const;
  std::size_t output_dim() const { return 1; }
  double evaluate(const Sample& s) const;

  bool operator==(const StatisticSpec&) const = default;
};

std::vector<StatisticSpec> parse_statistic_list(
    const std::vector<std::string>& names);
std::string statistic_set_name(const std::vector<StatisticSpec>& specs);

// Concatenates the statistics into one summary vector. Component errors are
// rethrown with the failing statistic named.
SummaryVector compose_statistics(const std::vector<StatisticSpec>& specs,
                                 const Sample& sample);

}  // namespace abcmc
