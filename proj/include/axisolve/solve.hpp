#pragma once

#include <vector>

#include "axisolve/comm.hpp"
#include "axisolve/elliptic.hpp"
#include "axisolve/iterative.hpp"

namespace axisolve {

struct EllipticSolveOptions {
  SolverKind solver = SolverKind::Pcg;
  BoundsMode bounds = BoundsMode::Lanczos;
  double vtilde = 0.0;  // <= 0 selects (s1 + s2) / 2
  double shift = -1.0;  // < 0 selects (d1 + d2) / 2
  double tol = 1e-10;
  std::size_t max_iter = 1000;
  std::size_t check_every = 8;
  int ranks = 1;  // r-slabs; 1 runs the serial kernels
  comm::ExecutorKind executor = comm::ExecutorKind::Simulator;
  IterationObserver observer;  // called on rank 1 only
};

struct EllipticSolution {
  std::vector<double> x;
  IterationReport report;
  double vtilde = 0.0;
  double shift = 0.0;
  SpectralBounds bounds;  // Chebyshev only
  comm::CommStats comm_stats;
};

/// Solves -A y = phi (the SPD form of the operator) with the separable preconditioner.
/// With ranks > 1 the operator, the preconditioner and the inner products run SPMD on
/// r-slabs; Lanczos bounds are estimated once on the serial operator beforehand.
[[nodiscard]] EllipticSolution solve_elliptic(const DiscreteOperator& op, const EllipticSolveOptions& options = {});

}  // namespace axisolve
