#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace axisolve {

/// Tridiagonal matrix of order n.
///
/// Row i (1-based) reads  c_i x_{i-1} + b_i x_i + a_i x_{i+1}.
/// Storage is 0-based and contiguous per band:
///   diag()[i-1]  = b_i,  i = 1..n
///   upper()[i-1] = a_i,  i = 1..n-1   (couples row i to column i+1)
///   lower()[i-2] = c_i,  i = 2..n     (couples row i to column i-1)
/// The 1-based accessors b(i), a(i), c(i) follow the same mapping.
class TridiagonalMatrix {
 public:
  TridiagonalMatrix() = default;

  /// Throws DimensionMismatch unless the bands have lengths n, n-1, n-1 with n >= 1.
  TridiagonalMatrix(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper);

  /// Constant-band matrix tridiag(lower, diag, upper) of order n.
  static TridiagonalMatrix constant(std::size_t n, double lower, double diag, double upper);

  [[nodiscard]] std::size_t order() const noexcept { return diag_.size(); }

  [[nodiscard]] double b(std::size_t i) const { return diag_[i - 1]; }
  [[nodiscard]] double a(std::size_t i) const { return upper_[i - 1]; }
  [[nodiscard]] double c(std::size_t i) const { return lower_[i - 2]; }

  [[nodiscard]] std::span<const double> lower() const noexcept { return lower_; }
  [[nodiscard]] std::span<const double> diag() const noexcept { return diag_; }
  [[nodiscard]] std::span<const double> upper() const noexcept { return upper_; }

  /// y = A x
  void apply(std::span<const double> x, std::span<double> y) const;
  [[nodiscard]] std::vector<double> apply(std::span<const double> x) const;

  [[nodiscard]] TridiagonalMatrix transpose() const;

  /// |b_i| >= |a_i| + |c_i| for all rows, strict in at least one.
  [[nodiscard]] bool is_diagonally_dominant() const noexcept;

  friend bool operator==(const TridiagonalMatrix&, const TridiagonalMatrix&) = default;

 private:
  std::vector<double> lower_;
  std::vector<double> diag_;
  std::vector<double> upper_;
};

/// Rows/columns l..t (1-based, inclusive) of A; couplings across the cut are dropped.
[[nodiscard]] TridiagonalMatrix submatrix(const TridiagonalMatrix& matrix, std::size_t l, std::size_t t);

/// LU factors of a tridiagonal matrix without pivoting, reusable across right-hand sides.
class ThomasFactorization {
 public:
  ThomasFactorization() = default;

  /// Throws ZeroPivot if a pivot magnitude falls below kPivotThreshold.
  explicit ThomasFactorization(const TridiagonalMatrix& matrix);

  static constexpr double kPivotThreshold = 1e-300;

  [[nodiscard]] std::size_t order() const noexcept { return inv_pivot_.size(); }

  /// Solves A x = f. x may alias f.
  void solve(std::span<const double> f, std::span<double> x) const;
  [[nodiscard]] std::vector<double> solve(std::span<const double> f) const;

  /// Solves `count` right-hand sides stored one after another (rhs-major).
  void solve_batch(std::span<const double> f, std::span<double> x, std::size_t count) const;

 private:
  std::vector<double> multiplier_;  // l_i = c_i / u_{i-1}, i = 2..n
  std::vector<double> inv_pivot_;   // 1 / u_i
  std::vector<double> upper_;       // a_i
};

/// Sequential Thomas solve of A x = f.
[[nodiscard]] std::vector<double> thomas_solve(const TridiagonalMatrix& matrix, std::span<const double> f);

/// ||A x - f||_2 / ||f||_2; throws ZeroRhs when ||f||_2 == 0.
[[nodiscard]] double residual_relnorm(const TridiagonalMatrix& matrix, std::span<const double> x,
                                      std::span<const double> f);

}  // namespace axisolve
