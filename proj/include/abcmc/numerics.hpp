#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "abcmc/errors.hpp"

namespace abcmc {

// Standard normal quantile, absolute error below 1e-9 on (0,1).
// Odd symmetry holds: |z(p) + z(1-p)| stays below 1e-12.
double std_normal_quantile(double p);

// Lower-tail standard normal CDF.
double std_normal_cdf(double x);

// P(X > x) for X chi-square distributed with dof degrees of freedom.
// Monotone non-increasing in x, values in [0, 1].
double chi_square_sf(double x, int dof);

enum class DistanceKind { euclidean, l1 };

const char* distance_kind_name(DistanceKind kind);
DistanceKind parse_distance_kind(const std::string& name);

struct WeightedDistanceSpec {
  DistanceKind kind = DistanceKind::euclidean;
  std::vector<double> weights;  // empty stands for unit weights

  static WeightedDistanceSpec unit(DistanceKind kind, std::size_t dim);
};

// Weighted L2 or L1 distance between equal-length vectors. Weights must be
// non-negative with at least one strictly positive entry.
double weighted_distance(std::span<const double> a, std::span<const double> b,
                         const WeightedDistanceSpec& spec);

// Order statistic x_(k) with k = ceil(q * n), q in (0, 1]. Deterministic
// under ties; the input does not need to be sorted.
double empirical_quantile(std::span<const double> xs, double q);

// Minimal dense matrix, row major. Sized for d <= 16 workloads.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  static Matrix identity(std::size_t n);
};

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j pairs with values[j]
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix.
SymmetricEigen symmetric_eigen(const Matrix& m);

struct SpdSolution {
  std::vector<double> x;
  bool regularized = false;
};

// Solves M x = v for symmetric M intended to be positive semi-definite.
// When the smallest eigenvalue falls below 1e-12 * trace(M)/d, a ridge of
// 1e-10 * trace(M)/d is added to the diagonal and the solution is flagged.
SpdSolution solve_spd(const Matrix& m, std::span<const double> v);

}  // namespace abcmc
