#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "axisolve/comm.hpp"
#include "axisolve/dichotomy.hpp"

namespace axisolve {

/// Half-cell-offset grid on [0, l1] x [0, l2]:
///   r_i = (i - 0.5) h1, i = 1..N1, h1 = l1 / (N1 - 0.5)
///   z_k = (k - 0.5) h2, k = 1..N2, h2 = l2 / (N2 - 0.5)
/// Column i = N1 lies on r = l1 and carries the Dirichlet value 0, so the unknowns are
/// i = 1..N1-1, k = 1..N2, stored k-major: index (k-1)(N1-1) + (i-1).
class Grid2D {
 public:
  /// DomainError unless N1, N2 >= 2 and l1, l2 > 0.
  Grid2D(std::size_t n1, std::size_t n2, double l1, double l2);

  [[nodiscard]] std::size_t n1() const noexcept { return n1_; }
  [[nodiscard]] std::size_t n2() const noexcept { return n2_; }
  [[nodiscard]] double l1() const noexcept { return l1_; }
  [[nodiscard]] double l2() const noexcept { return l2_; }
  [[nodiscard]] double h1() const noexcept { return l1_ / (static_cast<double>(n1_) - 0.5); }
  [[nodiscard]] double h2() const noexcept { return l2_ / (static_cast<double>(n2_) - 0.5); }
  [[nodiscard]] double r(std::size_t i) const noexcept { return (static_cast<double>(i) - 0.5) * h1(); }
  [[nodiscard]] double z(std::size_t k) const noexcept { return (static_cast<double>(k) - 0.5) * h2(); }

  /// Unknowns per r-line (N1 - 1) and in total.
  [[nodiscard]] std::size_t line() const noexcept { return n1_ - 1; }
  [[nodiscard]] std::size_t unknowns() const noexcept { return (n1_ - 1) * n2_; }
  [[nodiscard]] std::size_t index(std::size_t i, std::size_t k) const noexcept { return (k - 1) * (n1_ - 1) + (i - 1); }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  std::size_t n1_;
  std::size_t n2_;
  double l1_;
  double l2_;
};

using Field = std::function<double(double r, double z)>;

struct CoefficientFields {
  Field kappa;  // > 0
  Field q;      // >= 0
};

/// s1 <= kappa <= s2, d1 <= q <= d2 over the sampled staggered and nodal points.
struct CoefficientBounds {
  double s1 = 0.0;
  double s2 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Arrays of the five-point scheme, each of length grid.unknowns(), k-major.
///   a1(i,k) = rbar_i kappa(rbar_i, z_k)   flux between i and i+1 (i = N1-1 couples to the Dirichlet column)
///   a2(i,k) = r_i kappa(r_i, zbar_k)      flux between k and k+1; a2(i, N2) = 0 (no flux through z = l2)
///   w(i,k)  = r_i q(r_i, z_k)
///   phi(i,k) = r_i f(r_i, z_k)
/// with rbar_i = r_i + h1/2, zbar_k = z_k + h2/2.
struct DiscreteOperator {
  Grid2D grid;
  std::vector<double> a1;
  std::vector<double> a2;
  std::vector<double> w;
  std::vector<double> phi;
  CoefficientBounds bounds;
};

/// Samples the coefficients. NonPositiveCoefficient if kappa <= 0 or q < 0 at a sampled point.
[[nodiscard]] DiscreteOperator assemble(const Grid2D& grid, const CoefficientFields& fields, const Field& f);

/// Returns (Lambda_r + Lambda_z) y - w y. Row i = 1 carries only the outward flux
/// a1(1,k)(y_2 - y_1)/h1^2 (zero flux through the axis); z-ends are closed the same way.
/// The operator is symmetric and negative definite.
void apply_A(const DiscreteOperator& op, std::span<const double> y, std::span<double> out);
[[nodiscard]] std::vector<double> apply_A(const DiscreteOperator& op, std::span<const double> y);
/// Serial reference for apply_A; bit-identical results.
void apply_A_serial(const DiscreteOperator& op, std::span<const double> y, std::span<double> out);

/// -apply_A, the SPD form the iterative solvers work with; its right-hand side is phi.
void apply_spd(const DiscreteOperator& op, std::span<const double> y, std::span<double> out);

struct ManufacturedProblem {
  DiscreteOperator op;          // phi holds the discrete right-hand side
  std::vector<double> exact;    // exact solution sampled at the unknowns
};

/// Builds phi from a smooth exact solution by high-order central differences of the
/// flux form -( (1/r)(r kappa u_r)_r + (kappa u_z)_z - q u ).
/// BoundaryViolation if u_z at z = 0, l2 or u at r = l1 exceeds 1e-8 (relative to the
/// solution scale) at any sampled boundary point.
[[nodiscard]] ManufacturedProblem manufactured_problem(const Grid2D& grid, const Field& exact,
                                                       const CoefficientFields& fields);

/// sqrt(h1 h2 sum e^2) over the unknowns.
[[nodiscard]] double grid_l2(const Grid2D& grid, std::span<const double> e);

/// Rank-local part of the operator for an r-slab decomposition: rank m owns lines
/// i = first(m)..last(m) of every k-row. Local vectors are k-major with the slab width.
class SlabOperator {
 public:
  SlabOperator(const DiscreteOperator& op, const Partition& partition, int rank);

  [[nodiscard]] const Grid2D& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t first() const noexcept { return first_; }
  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::size_t local_size() const noexcept { return width_ * grid_.n2(); }
  [[nodiscard]] std::span<const double> phi() const noexcept { return phi_; }

  /// SPD operator -((Lambda_r + Lambda_z) - w) on the slab. Exchanges one column of N2
  /// values with each r-neighbour.
  void apply_spd(comm::Comm& comm, std::span<const double> y, std::span<double> out, int tag) const;

  /// Copies this rank's part out of / into a global vector.
  void scatter(std::span<const double> global, std::span<double> local) const;
  void gather(std::span<const double> local, std::span<double> global) const;

 private:
  Grid2D grid_;
  int rank_;
  int ranks_;
  std::size_t first_;
  std::size_t width_;
  std::vector<double> a1_;       // local columns plus the left neighbour's a1 in slot 0
  std::vector<double> a2_;
  std::vector<double> w_;
  std::vector<double> phi_;
};

}  // namespace axisolve
