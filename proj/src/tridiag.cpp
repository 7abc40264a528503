#include "axisolve/tridiag.hpp"

#include <cmath>
#include <string>

#include "axisolve/error.hpp"

namespace axisolve {

namespace {

void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(Errc::DimensionMismatch,
                std::string(what) + " has length " + std::to_string(got) + ", expected " + std::to_string(want));
  }
}

}  // namespace

TridiagonalMatrix::TridiagonalMatrix(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
    : lower_(std::move(lower)), diag_(std::move(diag)), upper_(std::move(upper)) {
  if (diag_.empty()) throw Error(Errc::DimensionMismatch, "tridiagonal matrix of order 0");
  require_length(lower_.size(), diag_.size() - 1, "sub-diagonal");
  require_length(upper_.size(), diag_.size() - 1, "super-diagonal");
}

TridiagonalMatrix TridiagonalMatrix::constant(std::size_t n, double lower, double diag, double upper) {
  if (n == 0) throw Error(Errc::DimensionMismatch, "tridiagonal matrix of order 0");
  return {std::vector<double>(n - 1, lower), std::vector<double>(n, diag), std::vector<double>(n - 1, upper)};
}

void TridiagonalMatrix::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = order();
  require_length(x.size(), n, "x");
  require_length(y.size(), n, "y");
  if (n == 1) {
    y[0] = diag_[0] * x[0];
    return;
  }
  y[0] = diag_[0] * x[0] + upper_[0] * x[1];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    y[i] = lower_[i - 1] * x[i - 1] + diag_[i] * x[i] + upper_[i] * x[i + 1];
  }
  y[n - 1] = lower_[n - 2] * x[n - 2] + diag_[n - 1] * x[n - 1];
}

std::vector<double> TridiagonalMatrix::apply(std::span<const double> x) const {
  std::vector<double> y(order());
  apply(x, y);
  return y;
}

TridiagonalMatrix TridiagonalMatrix::transpose() const { return {upper_, diag_, lower_}; }

bool TridiagonalMatrix::is_diagonally_dominant() const noexcept {
  const std::size_t n = order();
  bool strict = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double off = (i > 0 ? std::abs(lower_[i - 1]) : 0.0) + (i + 1 < n ? std::abs(upper_[i]) : 0.0);
    const double d = std::abs(diag_[i]);
    if (d < off) return false;
    if (d > off) strict = true;
  }
  return strict;
}

TridiagonalMatrix submatrix(const TridiagonalMatrix& matrix, std::size_t l, std::size_t t) {
  const std::size_t n = matrix.order();
  if (l < 1 || l > t || t > n) {
    throw Error(Errc::IndexOutOfRange, "submatrix rows " + std::to_string(l) + ".." + std::to_string(t) +
                                           " of an order-" + std::to_string(n) + " matrix");
  }
  const auto lo = matrix.lower();
  const auto di = matrix.diag();
  const auto up = matrix.upper();
  // rows l..t keep c_{l+1..t}, b_{l..t}, a_{l..t-1}
  return {std::vector<double>(lo.begin() + static_cast<std::ptrdiff_t>(l - 1), lo.begin() + static_cast<std::ptrdiff_t>(t - 1)),
          std::vector<double>(di.begin() + static_cast<std::ptrdiff_t>(l - 1), di.begin() + static_cast<std::ptrdiff_t>(t)),
          std::vector<double>(up.begin() + static_cast<std::ptrdiff_t>(l - 1), up.begin() + static_cast<std::ptrdiff_t>(t - 1))};
}

ThomasFactorization::ThomasFactorization(const TridiagonalMatrix& matrix)
    : multiplier_(matrix.order() > 0 ? matrix.order() - 1 : 0),
      inv_pivot_(matrix.order()),
      upper_(matrix.upper().begin(), matrix.upper().end()) {
  const std::size_t n = matrix.order();
  const auto lo = matrix.lower();
  const auto di = matrix.diag();
  double pivot = di[0];
  for (std::size_t i = 0;; ++i) {
    if (!(std::abs(pivot) >= kPivotThreshold)) {
      throw Error(Errc::ZeroPivot, "pivot " + std::to_string(pivot) + " at row " + std::to_string(i + 1));
    }
    inv_pivot_[i] = 1.0 / pivot;
    if (i + 1 == n) break;
    multiplier_[i] = lo[i] * inv_pivot_[i];
    pivot = di[i + 1] - multiplier_[i] * upper_[i];
  }
}

void ThomasFactorization::solve(std::span<const double> f, std::span<double> x) const {
  const std::size_t n = order();
  require_length(f.size(), n, "rhs");
  require_length(x.size(), n, "solution");
  x[0] = f[0];
  for (std::size_t i = 1; i < n; ++i) x[i] = f[i] - multiplier_[i - 1] * x[i - 1];
  x[n - 1] *= inv_pivot_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - upper_[i] * x[i + 1]) * inv_pivot_[i];
}

std::vector<double> ThomasFactorization::solve(std::span<const double> f) const {
  std::vector<double> x(f.size());
  solve(f, x);
  return x;
}

void ThomasFactorization::solve_batch(std::span<const double> f, std::span<double> x, std::size_t count) const {
  const std::size_t n = order();
  require_length(f.size(), n * count, "rhs batch");
  require_length(x.size(), n * count, "solution batch");
  for (std::size_t r = 0; r < count; ++r) solve(f.subspan(r * n, n), x.subspan(r * n, n));
}

std::vector<double> thomas_solve(const TridiagonalMatrix& matrix, std::span<const double> f) {
  return ThomasFactorization(matrix).solve(f);
}

double residual_relnorm(const TridiagonalMatrix& matrix, std::span<const double> x, std::span<const double> f) {
  const auto ax = matrix.apply(x);
  require_length(f.size(), ax.size(), "rhs");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num += (ax[i] - f[i]) * (ax[i] - f[i]);
    den += f[i] * f[i];
  }
  if (den == 0.0) throw Error(Errc::ZeroRhs, "residual relative to a zero right-hand side");
  return std::sqrt(num / den);
}

}  // namespace axisolve
