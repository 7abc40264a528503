#include "axisolve/iterative.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include "axisolve/error.hpp"
#include "axisolve/kernels.hpp"

namespace axisolve {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

InnerProduct resolve_dot(const InnerProduct& dot) {
  if (dot) return dot;
  return [](std::span<const double> a, std::span<const double> b) { return kernels::dot(a, b); };
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

void record(IterationReport& report, const SolverOptions& options, std::size_t iter, double relres, double seconds,
            std::span<const double> x) {
  report.history.push_back({iter, relres, seconds});
  if (options.observer) options.observer(report.history.back(), x);
}

void check_options(const SolverOptions& options) {
  if (!(options.tol > 0.0)) throw Error(Errc::DomainError, "tolerance must be positive");
  if (options.check_every == 0) throw Error(Errc::DomainError, "check_every must be at least 1");
}

void out_of_iterations(const IterationReport& report, const SolverOptions& options, const char* method) {
  if (options.allow_max_iter) return;
  throw Error(Errc::MaxIterExceeded, std::string(method) + " stopped after " + std::to_string(report.iterations) +
                                         " iterations at relative residual " + fmt(report.relres) + " (tol " +
                                         fmt(options.tol) + ")");
}

}  // namespace

InnerProduct allreduce_dot(comm::Comm& comm, int tag) {
  return [&comm, tag](std::span<const double> a, std::span<const double> b) {
    return comm.allreduce_sum(kernels::dot(a, b), tag);
  };
}

void SpectralBounds::validate() const {
  if (!(gamma1 > 0.0) || !(gamma2 >= gamma1) || !std::isfinite(gamma2)) {
    throw Error(Errc::InvalidBounds, "spectral bounds [" + fmt(gamma1) + ", " + fmt(gamma2) + "]");
  }
}

void IterationReport::write_csv(std::ostream& out) const {
  out << "iter,relres,seconds\n";
  for (const auto& h : history) out << h.iter << ',' << fmt(h.relres) << ',' << fmt(h.seconds) << '\n';
}

SolveResult pcg_solve(const LinearOp& apply_a, const LinearOp& apply_binv, std::span<const double> f,
                      const SolverOptions& options) {
  check_options(options);
  const auto dot = resolve_dot(options.dot);
  const auto start = Clock::now();
  const std::size_t n = f.size();
  SolveResult result{std::vector<double>(n, 0.0), {}};
  IterationReport& report = result.report;
  std::vector<double> r(f.begin(), f.end());
  std::vector<double> z(n);
  std::vector<double> p(n);
  std::vector<double> q(n);

  const double fnorm = std::sqrt(dot(f, f));
  apply_binv(r, z);
  report.preconditioner_applications = 1;
  if (fnorm == 0.0) {
    report.converged = true;
    record(report, options, 0, 0.0, elapsed(start), result.x);
    return result;
  }
  double rz = dot(r, z);
  if (!(rz > 0.0)) throw Error(Errc::Breakdown, "r^T B^-1 r = " + fmt(rz) + " at the initial residual");
  p = z;

  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    apply_a(p, q);
    ++report.operator_applications;
    const double pq = dot(p, q);
    if (!(pq > 0.0)) throw Error(Errc::Breakdown, "p^T A p = " + fmt(pq) + " at iteration " + std::to_string(it));
    const double alpha = rz / pq;
    kernels::axpy(alpha, p, result.x);
    kernels::axpy(-alpha, q, r);
    double relres = std::sqrt(dot(r, r)) / fnorm;
    if (relres <= options.tol) {
      // Confirm against the true residual; the recurrence drifts at tight tolerances.
      apply_a(result.x, q);
      ++report.operator_applications;
      for (std::size_t i = 0; i < n; ++i) r[i] = f[i] - q[i];
      relres = std::sqrt(dot(r, r)) / fnorm;
    }
    apply_binv(r, z);
    ++report.preconditioner_applications;
    report.iterations = it;
    report.relres = relres;
    record(report, options, it, relres, elapsed(start), result.x);
    if (relres <= options.tol) {
      report.converged = true;
      return result;
    }
    const double rz_next = dot(r, z);
    if (!(rz_next > 0.0)) {
      throw Error(Errc::Breakdown, "r^T B^-1 r = " + fmt(rz_next) + " at iteration " + std::to_string(it));
    }
    kernels::xpby(z, rz_next / rz, p);
    rz = rz_next;
  }
  out_of_iterations(report, options, "PCG");
  return result;
}

double chebyshev_rate(const SpectralBounds& bounds) {
  bounds.validate();
  const double s = std::sqrt(bounds.gamma1 / bounds.gamma2);
  return (1.0 - s) / (1.0 + s);
}

SolveResult chebyshev_solve(const LinearOp& apply_a, const LinearOp& apply_binv, std::span<const double> f,
                            const SpectralBounds& bounds, const SolverOptions& options) {
  bounds.validate();
  check_options(options);
  const auto dot = resolve_dot(options.dot);
  const auto start = Clock::now();
  const std::size_t n = f.size();
  SolveResult result{std::vector<double>(n, 0.0), {}};
  IterationReport& report = result.report;

  const double fnorm = std::sqrt(dot(f, f));
  if (fnorm == 0.0) {
    report.converged = true;
    record(report, options, 0, 0.0, elapsed(start), result.x);
    return result;
  }
  const double tau0 = 2.0 / (bounds.gamma1 + bounds.gamma2);
  const double xi = bounds.gamma1 / bounds.gamma2;
  const double rho = (1.0 - xi) / (1.0 + xi);
  std::vector<double>& x = result.x;
  std::vector<double> x_prev(n, 0.0);
  std::vector<double> r(n);
  std::vector<double> z(n);
  double omega = 1.0;
  report.relres = 1.0;

  for (std::size_t k = 0;; ++k) {
    if (k == 0) {
      std::copy(f.begin(), f.end(), r.begin());
    } else {
      apply_a(x, r);
      ++report.operator_applications;
      for (std::size_t i = 0; i < n; ++i) r[i] = f[i] - r[i];
    }
    report.iterations = k;
    if (k > 0 && (k % options.check_every == 0 || k == options.max_iter)) {
      report.relres = std::sqrt(dot(r, r)) / fnorm;
      record(report, options, k, report.relres, elapsed(start), x);
      if (report.relres <= options.tol) {
        report.converged = true;
        return result;
      }
    }
    if (k == options.max_iter) break;
    apply_binv(r, z);
    ++report.preconditioner_applications;
    if (k == 1) {
      omega = 1.0 / (1.0 - 0.5 * rho * rho);
    } else if (k > 1) {
      omega = 1.0 / (1.0 - 0.25 * rho * rho * omega);
    }
    const auto len = static_cast<long>(n);
    const double w = omega;
#pragma omp parallel for schedule(static) if (kernels::parallel() && len > 16384)
    for (long ii = 0; ii < len; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const double next = x_prev[i] + w * (tau0 * z[i] + x[i] - x_prev[i]);
      x_prev[i] = x[i];
      x[i] = next;
    }
  }
  out_of_iterations(report, options, "Chebyshev");
  return result;
}

RitzEstimate estimate_spectrum(const LinearOp& apply_a, const LinearOp& apply_binv, std::size_t n,
                               const LanczosOptions& options) {
  if (n == 0 || options.steps == 0) throw Error(Errc::DomainError, "Lanczos needs n >= 1 and steps >= 1");
  if (!(options.margin >= 0.0 && options.margin < 1.0)) throw Error(Errc::DomainError, "margin must lie in [0, 1)");
  const auto dot = resolve_dot(options.dot);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& e : v) e = uni(rng);
  std::vector<double> v_prev(n, 0.0);
  std::vector<double> w(n);
  std::vector<double> u(n);
  std::vector<double> zu(n);

  apply_binv(v, w);
  const double b0 = dot(v, w);
  if (!(b0 > 0.0)) throw Error(Errc::Breakdown, "start vector has B^-1 norm^2 " + fmt(b0));
  const double s0 = 1.0 / std::sqrt(b0);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] *= s0;
    w[i] *= s0;
  }

  std::vector<double> alphas;
  std::vector<double> betas;
  double beta = 0.0;
  double scale = 0.0;
  for (std::size_t j = 0; j < options.steps; ++j) {
    apply_a(w, u);
    const double alpha = dot(w, u);
    if (!(alpha > 0.0)) throw Error(Errc::Breakdown, "Rayleigh quotient " + fmt(alpha) + " at step " + std::to_string(j + 1));
    for (std::size_t i = 0; i < n; ++i) u[i] -= alpha * v[i] + beta * v_prev[i];
    alphas.push_back(alpha);
    scale = std::max(scale, alpha);
    if (j + 1 == options.steps) break;
    apply_binv(u, zu);
    const double b2 = dot(u, zu);
    if (b2 < -1e-12 * scale * scale) throw Error(Errc::Breakdown, "B^-1 norm^2 " + fmt(b2) + " at step " + std::to_string(j + 1));
    const double b = std::sqrt(std::max(b2, 0.0));
    if (b <= 1e-10 * scale) break;
    betas.push_back(b);
    v_prev.swap(v);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = u[i] / b;
      w[i] = zu[i] / b;
    }
    beta = b;
  }

  RitzEstimate est;
  est.steps = alphas.size();
  const auto m = static_cast<Eigen::Index>(alphas.size());
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alphas.data(), m);
  Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(betas.data(), m - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& theta = solver.eigenvalues();
  est.ritz.assign(theta.data(), theta.data() + theta.size());
  if (!(est.ritz.front() > 0.0)) throw Error(Errc::Breakdown, "non-positive Ritz value " + fmt(est.ritz.front()));
  est.bounds = {(1.0 - options.margin) * est.ritz.front(), (1.0 + options.margin) * est.ritz.back()};
  return est;
}

SpectralBounds estimate_bounds(const LinearOp& apply_a, const LinearOp& apply_binv, std::size_t n,
                               const LanczosOptions& options) {
  return estimate_spectrum(apply_a, apply_binv, n, options).bounds;
}

SpectralBounds analytic_bounds(const CoefficientBounds& c, double vtilde, double shift) {
  if (!(vtilde > 0.0) || !(shift >= 0.0)) throw Error(Errc::InvalidBounds, "preconditioner needs vtilde > 0, shift >= 0");
  SpectralBounds b{c.s1 / vtilde, c.s2 / vtilde};
  if (shift > 0.0) {
    b.gamma1 = std::min(b.gamma1, c.d1 / shift);
    b.gamma2 = std::max(b.gamma2, c.d2 / shift);
  } else if (c.d2 > 0.0) {
    throw Error(Errc::InvalidBounds, "q > 0 with a zero preconditioner shift has no termwise bound");
  }
  b.validate();
  return b;
}

}  // namespace axisolve
