#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "axisolve/elliptic.hpp"

namespace axisolve {

/// out = Op(in). Used for both the operator and the preconditioner inverse.
using LinearOp = std::function<void(std::span<const double> in, std::span<double> out)>;
/// Global inner product. In SPMD use it wraps a local dot in an all-reduce.
using InnerProduct = std::function<double(std::span<const double>, std::span<const double>)>;

/// Local kernels::dot summed over all ranks with comm.allreduce_sum under `tag`.
[[nodiscard]] InnerProduct allreduce_dot(comm::Comm& comm, int tag);

enum class SolverKind { Pcg, Chebyshev };
/// Where Chebyshev takes its spectral bounds from.
enum class BoundsMode { Lanczos, Analytic };

/// Bounds gamma1 <= gamma2 on the spectrum of B^-1 A.
struct SpectralBounds {
  double gamma1 = 0.0;
  double gamma2 = 0.0;

  /// InvalidBounds unless 0 < gamma1 <= gamma2 < inf.
  void validate() const;
};

struct IterationRecord {
  std::size_t iter = 0;
  double relres = 0.0;
  double seconds = 0.0;
};

struct IterationReport {
  std::size_t iterations = 0;
  double relres = 0.0;
  bool converged = false;
  std::vector<IterationRecord> history;
  /// Preconditioner inversions. PCG: iterations + 1 (the initial residual is preconditioned
  /// before the first step). Chebyshev: iterations.
  std::size_t preconditioner_applications = 0;
  std::size_t operator_applications = 0;

  /// `iter,relres,seconds`
  void write_csv(std::ostream& out) const;
};

struct SolveResult {
  std::vector<double> x;
  IterationReport report;
};

/// Called after every iteration that computed a residual norm.
using IterationObserver = std::function<void(const IterationRecord&, std::span<const double> x)>;

struct SolverOptions {
  double tol = 1e-10;
  std::size_t max_iter = 1000;
  /// Chebyshev: residual norm every this many steps.
  std::size_t check_every = 8;
  /// Return the last iterate instead of throwing MaxIterExceeded.
  bool allow_max_iter = false;
  InnerProduct dot;  // defaults to kernels::dot
  IterationObserver observer;
};

/// Preconditioned conjugate gradients from x = 0. Stops on ||f - A x|| / ||f|| <= tol, confirmed
/// with an explicitly recomputed residual. Breakdown if p^T A p <= 0 or r^T B^-1 r < 0,
/// MaxIterExceeded after max_iter steps.
[[nodiscard]] SolveResult pcg_solve(const LinearOp& apply_a, const LinearOp& apply_binv, std::span<const double> f,
                                    const SolverOptions& options = {});

/// Three-layer Chebyshev iteration on [gamma1, gamma2] from x = 0:
///   x_{k+1} = x_{k-1} + omega_{k+1} (tau0 B^-1 (f - A x_k) + x_k - x_{k-1}),  tau0 = 2 / (gamma1 + gamma2)
///   omega_1 = 1, omega_2 = 1 / (1 - rho^2 / 2), omega_{k+1} = 1 / (1 - rho^2 omega_k / 4),  rho = (1 - xi) / (1 + xi)
/// The only inner products are ||f|| once and a residual norm every check_every steps.
[[nodiscard]] SolveResult chebyshev_solve(const LinearOp& apply_a, const LinearOp& apply_binv,
                                          std::span<const double> f, const SpectralBounds& bounds,
                                          const SolverOptions& options = {});

/// (1 - sqrt(xi)) / (1 + sqrt(xi)) with xi = gamma1 / gamma2.
[[nodiscard]] double chebyshev_rate(const SpectralBounds& bounds);

struct LanczosOptions {
  std::size_t steps = 50;
  std::uint64_t seed = 1;
  /// Returned bounds are ((1 - margin) theta_min, (1 + margin) theta_max).
  double margin = 0.05;
  InnerProduct dot;
};

struct RitzEstimate {
  std::vector<double> ritz;  // ascending
  std::size_t steps = 0;
  SpectralBounds bounds;
};

/// Lanczos on A B^-1 in the B^-1 inner product (same spectrum as B^-1 A), from a random start
/// vector of length n. Stops early on an invariant subspace. Breakdown on a non-positive
/// Rayleigh quotient or B^-1 norm.
[[nodiscard]] RitzEstimate estimate_spectrum(const LinearOp& apply_a, const LinearOp& apply_binv, std::size_t n,
                                             const LanczosOptions& options = {});
[[nodiscard]] SpectralBounds estimate_bounds(const LinearOp& apply_a, const LinearOp& apply_binv, std::size_t n,
                                             const LanczosOptions& options = {});

/// Bounds for the preconditioner with coefficients (vtilde, shift) against an operator with
/// coefficient bounds: each term of (A y, y) over the matching term of (B y, y) lies in
/// [s1/vtilde, s2/vtilde] or [d1/shift, d2/shift]. InvalidBounds when shift = 0 but d2 > 0.
[[nodiscard]] SpectralBounds analytic_bounds(const CoefficientBounds& coefficients, double vtilde, double shift);

}  // namespace axisolve
