#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "axisolve/comm.hpp"
#include "axisolve/dct.hpp"
#include "axisolve/dichotomy.hpp"
#include "axisolve/elliptic.hpp"
#include "axisolve/tridiag.hpp"

namespace axisolve {

/// (s1 + s2) / 2
[[nodiscard]] double vtilde_from_bounds(const CoefficientBounds& bounds);
/// (d1 + d2) / 2
[[nodiscard]] double average_shift(const CoefficientBounds& bounds);

struct SovOptions {
  /// Build the per-mode dichotomy plans on first use instead of up front.
  bool lazy_plans = false;
};

/// Constant-coefficient preconditioner on the elliptic grid, in SPD form:
///   M y = -(Lambda_r + Lambda_z) y + d y,   a1 = rbar vtilde, a2 = r vtilde, d_i = r_i shift
/// with the same axis, Dirichlet and z-end closures as the variable operator. Inverted by a
/// cosine transform in z followed by one tridiagonal solve per mode along r:
///   T_l = -Lambda_r + r vtilde lambda_l + d,   lambda_l = 4 sin^2(pi (l-1) / (2 N2)) / h2^2
class SovPreconditioner {
 public:
  /// DomainError unless vtilde > 0 and shift >= 0. With a partition of the r-line (order N1-1)
  /// a dichotomy plan is prepared per mode for the SPMD path.
  SovPreconditioner(const Grid2D& grid, double vtilde, double shift, std::optional<Partition> partition = std::nullopt,
                    SovOptions options = {});

  [[nodiscard]] const Grid2D& grid() const noexcept { return reference_.grid; }
  [[nodiscard]] double vtilde() const noexcept { return vtilde_; }
  [[nodiscard]] double shift() const noexcept { return shift_; }
  [[nodiscard]] std::size_t modes() const noexcept { return matrices_.size(); }
  [[nodiscard]] const std::optional<Partition>& partition() const noexcept { return partition_; }

  /// lambda_l for l = 1..N2.
  [[nodiscard]] double eigenvalue(std::size_t l) const;
  [[nodiscard]] const TridiagonalMatrix& mode_matrix(std::size_t l) const;
  /// The constant-coefficient operator whose SPD form is M.
  [[nodiscard]] const DiscreteOperator& reference() const noexcept { return reference_; }

  /// Dichotomy plan of mode l; built here on first request in lazy mode. DomainError without a partition.
  [[nodiscard]] const DichotomyPlan& plan(std::size_t l) const;
  [[nodiscard]] std::size_t plans_built() const;

  /// out = M y
  void apply(std::span<const double> y, std::span<double> out) const;

  /// y = M^-1 f on the whole grid. y may alias f.
  void apply_inverse(std::span<const double> f, std::span<double> y) const;
  [[nodiscard]] std::vector<double> apply_inverse(std::span<const double> f) const;

  /// SPMD form on this rank's r-slab (k-major, slab width columns). The transforms stay local;
  /// all N2 mode systems go through one dichotomy pass.
  void apply_inverse_on_rank(comm::Comm& comm, std::span<const double> f_local, std::span<double> y_local,
                             DichotomyTrace* trace = nullptr) const;

 private:
  void transform_columns(std::span<double> data, std::size_t width, bool forward) const;

  DiscreteOperator reference_;
  double vtilde_;
  double shift_;
  std::vector<double> eigenvalues_;
  std::vector<TridiagonalMatrix> matrices_;
  std::vector<ThomasFactorization> factors_;
  CosineTransform transform_;
  std::optional<Partition> partition_;

  struct PlanSlot {
    std::once_flag once;
    std::optional<DichotomyPlan> plan;
  };
  std::unique_ptr<PlanSlot[]> plans_;
};

}  // namespace axisolve
