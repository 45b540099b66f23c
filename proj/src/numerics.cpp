#include "abcmc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace abcmc {

namespace {

// Rational approximation of the normal quantile (Wichura's algorithm),
// relative error around 1e-15 before refinement.
double normal_quantile_rational(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
              67265.770927008700853) * r + 45921.953931549871457) * r +
            13731.693765509461125) * r + 1971.5909503065514427) * r +
          133.14166789178437745) * r + 3.387132872796366608);
    const double den =
        (((((((5226.495278852545703 * r + 28729.085735721942674) * r +
              39307.89580009271061) * r + 21213.794301586595867) * r +
            5394.1960214247511077) * r + 687.1870074920579083) * r +
          42.313330701600911252) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
              0.24178072517745061177) * r + 1.27045825245236838258) * r +
            3.64784832476320460504) * r + 5.7694972214606914055) * r +
          4.6303378461565452959) * r + 1.42343711074968357734);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
              0.0151986665636164571966) * r + 0.14810397642748007459) * r +
            0.68976733498510000455) * r + 1.6763848301838038494) * r +
          2.05319162663775882187) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              0.0012426609473880784386) * r + 0.026532189526576123093) * r +
            0.29656057182850489123) * r + 1.7848265399172913358) * r +
          5.4637849111641143699) * r + 6.6579046435011037772);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
              1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
            0.0148753612908506148525) * r + 0.13692988092273580531) * r +
          0.59983220655588793769) * r + 1.0);
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Regularized lower incomplete gamma P(a, x) by power series.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz's continued fraction.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("std_normal_quantile: p must lie in (0,1), got " +
                      std::to_string(p));
  }
  double x = normal_quantile_rational(p);
  // One Newton step on the CDF tightens the rational approximation.
  const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
  if (pdf > 1e-300) {
    x -= (std_normal_cdf(x) - p) / pdf;
  }
  return x;
}

double chi_square_sf(double x, int dof) {
  if (dof < 1) {
    throw DomainError("chi_square_sf: dof must be >= 1, got " +
                      std::to_string(dof));
  }
  if (std::isnan(x) || x < 0.0) {
    throw DomainError("chi_square_sf: x must be >= 0");
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double a = 0.5 * dof;
  const double t = 0.5 * x;
  double q = (t < a + 1.0) ? 1.0 - gamma_p_series(a, t) : gamma_q_cf(a, t);
  return std::min(1.0, std::max(0.0, q));
}

const char* distance_kind_name(DistanceKind kind) {
  return kind == DistanceKind::euclidean ? "euclidean" : "l1";
}

DistanceKind parse_distance_kind(const std::string& name) {
  if (name == "euclidean") return DistanceKind::euclidean;
  if (name == "l1") return DistanceKind::l1;
  throw DomainError("unknown distance kind '" + name + "'");
}

WeightedDistanceSpec WeightedDistanceSpec::unit(DistanceKind kind,
                                                std::size_t dim) {
  return {kind, std::vector<double>(dim, 1.0)};
}

double weighted_distance(std::span<const double> a, std::span<const double> b,
                         const WeightedDistanceSpec& spec) {
  if (a.size() != b.size()) {
    throw ShapeError("weighted_distance: vector lengths differ (" +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  std::vector<double> unit;
  std::span<const double> w = spec.weights;
  if (w.empty()) {
    unit.assign(a.size(), 1.0);
    w = unit;
  }
  if (w.size() != a.size()) {
    throw ShapeError("weighted_distance: weight length " +
                     std::to_string(w.size()) + " does not match dimension " +
                     std::to_string(a.size()));
  }
  bool any_positive = false;
  for (double wi : w) {
    if (wi < 0.0) throw DomainError("weighted_distance: negative weight");
    if (wi > 0.0) any_positive = true;
  }
  if (!any_positive) {
    throw DomainError("weighted_distance: all weights are zero");
  }
  double acc = 0.0;
  if (spec.kind == DistanceKind::euclidean) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      acc += w[i] * d * d;
    }
    return std::sqrt(acc);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += w[i] * std::fabs(a[i] - b[i]);
  }
  return acc;
}

double empirical_quantile(std::span<const double> xs, double q) {
  if (xs.empty()) throw DomainError("empirical_quantile: empty input");
  if (!(q > 0.0 && q <= 1.0)) {
    throw DomainError("empirical_quantile: q must lie in (0,1], got " +
                      std::to_string(q));
  }
  const double n = static_cast<double>(xs.size());
  // Guard against products like 0.07 * 100 landing just above an integer.
  auto k = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  k = std::max<std::size_t>(1, std::min(k, xs.size()));
  std::vector<double> copy(xs.begin(), xs.end());
  std::nth_element(copy.begin(), copy.begin() + (k - 1), copy.end());
  return copy[k - 1];
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SymmetricEigen symmetric_eigen(const Matrix& m) {
  if (m.rows != m.cols) throw ShapeError("symmetric_eigen: matrix not square");
  const std::size_t n = m.rows;
  Matrix a = m;
  Matrix v = Matrix::identity(n);
  double scale = 0.0;
  for (double x : a.data) scale = std::max(scale, std::fabs(x));
  const double tol = std::max(scale, 1.0) * 1e-14;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += std::fabs(a(i, j));
    if (off <= tol * 1e-2) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::fabs(a(p, q)) <= tol * 1e-6) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double apq = a(p, q);
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k != p && k != q) {
            const double akp = a(k, p);
            const double akq = a(k, q);
            a(k, p) = akp - s * (akq + tau * akp);
            a(p, k) = a(k, p);
            a(k, q) = akq + s * (akp - tau * akq);
            a(q, k) = a(k, q);
          }
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = vkp - s * (vkq + tau * vkp);
          v(k, q) = vkq + s * (vkp - tau * vkq);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

SpdSolution solve_spd(const Matrix& m, std::span<const double> v) {
  if (m.rows != m.cols) throw ShapeError("solve_spd: matrix not square");
  const std::size_t n = m.rows;
  if (v.size() != n) {
    throw ShapeError("solve_spd: rhs length " + std::to_string(v.size()) +
                     " does not match dimension " + std::to_string(n));
  }
  if (n == 0) throw DomainError("solve_spd: empty system");
  double scale = 0.0;
  for (double x : m.data) scale = std::max(scale, std::fabs(x));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::fabs(m(i, j) - m(j, i)) > 1e-9 * std::max(scale, 1e-300)) {
        throw ShapeError("solve_spd: matrix is not symmetric");
      }
    }
  }

  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += m(i, i);
  const double mean_diag = trace / static_cast<double>(n);
  const double eig_floor = 1e-12 * mean_diag;

  const SymmetricEigen eig = symmetric_eigen(m);
  SpdSolution sol;
  sol.regularized = eig.values.front() <= eig_floor;
  double ridge = 0.0;
  if (sol.regularized) {
    ridge = std::max(1e-10 * mean_diag, std::numeric_limits<double>::min());
  }

  // Spectral solve of (M + ridge I) x = v.
  sol.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += eig.vectors(i, j) * v[i];
    const double lambda = eig.values[j] + ridge;
    const double coef = proj / lambda;
    for (std::size_t i = 0; i < n; ++i) sol.x[i] += coef * eig.vectors(i, j);
  }
  return sol;
}

}  // namespace abcmc
