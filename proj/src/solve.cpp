#include "axisolve/solve.hpp"

#include <optional>

#include "axisolve/error.hpp"
#include "axisolve/sov.hpp"

namespace axisolve {

EllipticSolution solve_elliptic(const DiscreteOperator& op, const EllipticSolveOptions& options) {
  if (options.ranks < 1) throw Error(Errc::DomainError, "ranks must be at least 1");
  const Grid2D& grid = op.grid;
  EllipticSolution sol;
  sol.vtilde = options.vtilde > 0.0 ? options.vtilde : vtilde_from_bounds(op.bounds);
  sol.shift = options.shift >= 0.0 ? options.shift : average_shift(op.bounds);
  std::optional<Partition> partition;
  if (options.ranks > 1) partition = Partition::balanced(grid.line(), options.ranks);
  const SovPreconditioner pre(grid, sol.vtilde, sol.shift, partition);

  const LinearOp serial_a = [&op](std::span<const double> in, std::span<double> out) { apply_spd(op, in, out); };
  const LinearOp serial_binv = [&pre](std::span<const double> in, std::span<double> out) {
    pre.apply_inverse(in, out);
  };
  if (options.solver == SolverKind::Chebyshev) {
    sol.bounds = options.bounds == BoundsMode::Analytic ? analytic_bounds(op.bounds, sol.vtilde, sol.shift)
                                                        : estimate_bounds(serial_a, serial_binv, grid.unknowns());
  }
  SolverOptions so;
  so.tol = options.tol;
  so.max_iter = options.max_iter;
  so.check_every = options.check_every;
  auto run = [&](const LinearOp& a, const LinearOp& binv, std::span<const double> f, const SolverOptions& o) {
    return options.solver == SolverKind::Pcg ? pcg_solve(a, binv, f, o) : chebyshev_solve(a, binv, f, sol.bounds, o);
  };

  if (options.ranks == 1) {
    so.observer = options.observer;
    SolveResult res = run(serial_a, serial_binv, op.phi, so);
    sol.x = std::move(res.x);
    sol.report = std::move(res.report);
    return sol;
  }

  sol.x.assign(grid.unknowns(), 0.0);
  comm::World world(options.ranks);
  constexpr int kHaloTag = 1;
  constexpr int kDotTag = 2;
  world.run(options.executor, [&](comm::Comm& c) {
    const SlabOperator slab(op, *partition, c.rank());
    const LinearOp a = [&](std::span<const double> in, std::span<double> out) { slab.apply_spd(c, in, out, kHaloTag); };
    const LinearOp binv = [&](std::span<const double> in, std::span<double> out) {
      pre.apply_inverse_on_rank(c, in, out);
    };
    SolverOptions local = so;
    local.dot = allreduce_dot(c, kDotTag);
    if (c.rank() == 1) local.observer = options.observer;
    SolveResult res = run(a, binv, slab.phi(), local);
    slab.gather(res.x, sol.x);
    if (c.rank() == 1) sol.report = std::move(res.report);
  });
  sol.comm_stats = world.stats();
  return sol;
}

}  // namespace axisolve
