#pragma once

// Dense reference algebra and random problem generators shared by the tests.

#include <Eigen/Dense>
#include <random>
#include <span>
#include <vector>

#include "axisolve/tridiag.hpp"

namespace oracle {

inline Eigen::MatrixXd dense(const axisolve::TridiagonalMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.order());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = m.diag()[static_cast<std::size_t>(i)];
    if (i + 1 < n) {
      d(i, i + 1) = m.upper()[static_cast<std::size_t>(i)];
      d(i + 1, i) = m.lower()[static_cast<std::size_t>(i)];
    }
  }
  return d;
}

inline std::vector<double> dense_solve(const Eigen::MatrixXd& a, std::span<const double> f) {
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
  const Eigen::VectorXd x = a.partialPivLu().solve(rhs);
  return {x.data(), x.data() + x.size()};
}

inline std::vector<double> dense_solve(const axisolve::TridiagonalMatrix& m, std::span<const double> f) {
  return dense_solve(dense(m), f);
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

/// Random strictly diagonally dominant matrix; `margin` scales the excess of |b_i| over |a_i| + |c_i|.
inline axisolve::TridiagonalMatrix random_dominant(std::mt19937_64& rng, std::size_t n, double margin = 0.5) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ex(0.05, 1.0);
  std::vector<double> lower(n - 1), diag(n), upper(n - 1);
  for (auto& x : lower) x = u(rng);
  for (auto& x : upper) x = u(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double off = (i > 0 ? std::abs(lower[i - 1]) : 0.0) + (i + 1 < n ? std::abs(upper[i]) : 0.0);
    const double sign = u(rng) < 0 ? -1.0 : 1.0;
    diag[i] = sign * (off + margin * ex(rng));
  }
  return {std::move(lower), std::move(diag), std::move(upper)};
}

inline double rel_error(std::span<const double> x, std::span<const double> ref) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - ref[i]) * (x[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

inline double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

inline double dot(std::span<const double> x, std::span<const double> y) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<long double>(x[i]) * y[i];
  return static_cast<double>(s);
}

inline double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace oracle
