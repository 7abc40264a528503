#include "axisolve/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "axisolve/error.hpp"
#include "axisolve/kernels.hpp"

namespace axisolve {

namespace {

// One row of the five-point scheme. Missing neighbours enter with zero coefficient and value,
// which makes every branch (axis, Dirichlet column, z-ends) the same expression.
inline double stencil(double yc, double yw, double ye, double ys, double yn, double aw, double ae, double as, double an,
                      double w, double ih1, double ih2) {
  return (ae * (ye - yc) - aw * (yc - yw)) * ih1 + (an * (yn - yc) - as * (yc - ys)) * ih2 - w * yc;
}

void apply_rows(const DiscreteOperator& op, std::span<const double> y, std::span<double> out, std::size_t k, double sign) {
  const Grid2D& g = op.grid;
  const std::size_t m = g.line();
  const std::size_t n2 = g.n2();
  const double ih1 = 1.0 / (g.h1() * g.h1());
  const double ih2 = 1.0 / (g.h2() * g.h2());
  const std::size_t row = (k - 1) * m;
  const double* yc = y.data() + row;
  const double* ys = k > 1 ? yc - m : nullptr;
  const double* yn = k < n2 ? yc + m : nullptr;
  const double* a1 = op.a1.data() + row;
  const double* a2 = op.a2.data() + row;
  const double* a2s = k > 1 ? a2 - m : nullptr;
  const double* w = op.w.data() + row;
  double* o = out.data() + row;
  for (std::size_t j = 0; j < m; ++j) {
    const double yw = j > 0 ? yc[j - 1] : 0.0;
    const double ye = j + 1 < m ? yc[j + 1] : 0.0;
    const double aw = j > 0 ? a1[j - 1] : 0.0;
    const double vs = ys ? ys[j] : 0.0;
    const double vn = yn ? yn[j] : 0.0;
    const double as = a2s ? a2s[j] : 0.0;
    o[j] = sign * stencil(yc[j], yw, ye, vs, vn, aw, a1[j], as, a2[j], w[j], ih1, ih2);
  }
}

void check_sizes(const DiscreteOperator& op, std::span<const double> y, std::span<double> out) {
  const std::size_t n = op.grid.unknowns();
  if (y.size() != n || out.size() != n) {
    throw Error(Errc::DimensionMismatch, "grid vector of length " + std::to_string(y.size()) + ", expected " +
                                             std::to_string(n));
  }
}

void apply_all(const DiscreteOperator& op, std::span<const double> y, std::span<double> out, double sign, bool par) {
  check_sizes(op, y, out);
  const auto n2 = static_cast<long>(op.grid.n2());
#pragma omp parallel for schedule(static) if (par)
  for (long k = 1; k <= n2; ++k) apply_rows(op, y, out, static_cast<std::size_t>(k), sign);
}

// Fourth-order central first derivative.
double d1(const std::function<double(double)>& g, double x, double step) {
  return (-g(x + 2 * step) + 8 * g(x + step) - 8 * g(x - step) + g(x - 2 * step)) / (12 * step);
}

}  // namespace

Grid2D::Grid2D(std::size_t n1, std::size_t n2, double l1, double l2) : n1_(n1), n2_(n2), l1_(l1), l2_(l2) {
  if (n1 < 2 || n2 < 2) throw Error(Errc::DomainError, "grid needs N1, N2 >= 2");
  if (!(l1 > 0.0) || !(l2 > 0.0)) throw Error(Errc::DomainError, "grid extents must be positive");
}

DiscreteOperator assemble(const Grid2D& grid, const CoefficientFields& fields, const Field& f) {
  DiscreteOperator op{grid, {}, {}, {}, {}, {}};
  const std::size_t n = grid.unknowns();
  op.a1.resize(n);
  op.a2.resize(n);
  op.w.resize(n);
  op.phi.resize(n);
  double s1 = std::numeric_limits<double>::infinity();
  double s2 = -s1;
  double d1v = s1;
  double d2v = -s1;
  auto kappa_at = [&](double r, double z) {
    const double v = fields.kappa(r, z);
    if (!(v > 0.0)) {
      throw Error(Errc::NonPositiveCoefficient,
                  "kappa = " + std::to_string(v) + " at r = " + std::to_string(r) + ", z = " + std::to_string(z));
    }
    s1 = std::min(s1, v);
    s2 = std::max(s2, v);
    return v;
  };
  const double h1 = grid.h1();
  const double h2 = grid.h2();
  for (std::size_t k = 1; k <= grid.n2(); ++k) {
    for (std::size_t i = 1; i <= grid.line(); ++i) {
      const std::size_t idx = grid.index(i, k);
      const double r = grid.r(i);
      const double z = grid.z(k);
      const double rbar = r + 0.5 * h1;
      op.a1[idx] = rbar * kappa_at(rbar, z);
      op.a2[idx] = k < grid.n2() ? r * kappa_at(r, z + 0.5 * h2) : 0.0;
      const double q = fields.q ? fields.q(r, z) : 0.0;
      if (!(q >= 0.0)) {
        throw Error(Errc::NonPositiveCoefficient,
                    "q = " + std::to_string(q) + " at r = " + std::to_string(r) + ", z = " + std::to_string(z));
      }
      d1v = std::min(d1v, q);
      d2v = std::max(d2v, q);
      op.w[idx] = r * q;
      op.phi[idx] = f ? r * f(r, z) : 0.0;
    }
  }
  op.bounds = {s1, s2, d1v, d2v};
  return op;
}

void apply_A(const DiscreteOperator& op, std::span<const double> y, std::span<double> out) {
  apply_all(op, y, out, 1.0, kernels::parallel());
}

std::vector<double> apply_A(const DiscreteOperator& op, std::span<const double> y) {
  std::vector<double> out(op.grid.unknowns());
  apply_A(op, y, out);
  return out;
}

void apply_A_serial(const DiscreteOperator& op, std::span<const double> y, std::span<double> out) {
  apply_all(op, y, out, 1.0, false);
}

void apply_spd(const DiscreteOperator& op, std::span<const double> y, std::span<double> out) {
  apply_all(op, y, out, -1.0, kernels::parallel());
}

ManufacturedProblem manufactured_problem(const Grid2D& grid, const Field& exact, const CoefficientFields& fields) {
  const double scale_len = std::min(grid.l1(), grid.l2());
  const double step = 1e-3 * scale_len;

  double umax = 0.0;
  for (std::size_t k = 1; k <= grid.n2(); ++k) {
    for (std::size_t i = 1; i <= grid.n1(); ++i) umax = std::max(umax, std::abs(exact(grid.r(i), grid.z(k))));
  }
  const double value_tol = 1e-8 * std::max(1.0, umax);
  const double slope_tol = 1e-8 * std::max(1.0, umax / scale_len);
  for (std::size_t i = 1; i <= grid.n1(); ++i) {
    const double r = grid.r(i);
    for (const double zb : {0.0, grid.l2()}) {
      const double uz = d1([&](double z) { return exact(r, z); }, zb, step);
      if (std::abs(uz) > slope_tol) {
        throw Error(Errc::BoundaryViolation,
                    "du/dz = " + std::to_string(uz) + " at r = " + std::to_string(r) + ", z = " + std::to_string(zb));
      }
    }
  }
  for (std::size_t k = 1; k <= grid.n2(); ++k) {
    const double u = exact(grid.l1(), grid.z(k));
    if (std::abs(u) > value_tol) {
      throw Error(Errc::BoundaryViolation, "u = " + std::to_string(u) + " at r = l1, z = " + std::to_string(grid.z(k)));
    }
  }

  const Field rhs = [&](double r, double z) {
    auto flux_r = [&](double rr) { return rr * fields.kappa(rr, z) * d1([&](double x) { return exact(x, z); }, rr, step); };
    auto flux_z = [&](double zz) { return fields.kappa(r, zz) * d1([&](double x) { return exact(r, x); }, zz, step); };
    const double q = fields.q ? fields.q(r, z) : 0.0;
    return -(d1(flux_r, r, step) / r + d1(flux_z, z, step) - q * exact(r, z));
  };
  ManufacturedProblem mp{assemble(grid, fields, rhs), {}};
  mp.exact.resize(grid.unknowns());
  for (std::size_t k = 1; k <= grid.n2(); ++k) {
    for (std::size_t i = 1; i <= grid.line(); ++i) mp.exact[grid.index(i, k)] = exact(grid.r(i), grid.z(k));
  }
  return mp;
}

double grid_l2(const Grid2D& grid, std::span<const double> e) {
  double s = 0.0;
  for (double v : e) s += v * v;
  return std::sqrt(s * grid.h1() * grid.h2());
}

SlabOperator::SlabOperator(const DiscreteOperator& op, const Partition& partition, int rank)
    : grid_(op.grid), rank_(rank), ranks_(partition.ranks()), first_(partition.first(rank)), width_(partition.size(rank)) {
  if (partition.order() != grid_.line()) {
    throw Error(Errc::InvalidPartition, "slab partition covers " + std::to_string(partition.order()) +
                                            " lines, grid has " + std::to_string(grid_.line()));
  }
  const std::size_t n2 = grid_.n2();
  a1_.assign((width_ + 1) * n2, 0.0);
  a2_.resize(width_ * n2);
  w_.resize(width_ * n2);
  phi_.resize(width_ * n2);
  for (std::size_t k = 1; k <= n2; ++k) {
    if (first_ > 1) a1_[(k - 1) * (width_ + 1)] = op.a1[grid_.index(first_ - 1, k)];
    for (std::size_t j = 0; j < width_; ++j) {
      const std::size_t g = grid_.index(first_ + j, k);
      const std::size_t l = (k - 1) * width_ + j;
      a1_[(k - 1) * (width_ + 1) + j + 1] = op.a1[g];
      a2_[l] = op.a2[g];
      w_[l] = op.w[g];
      phi_[l] = op.phi[g];
    }
  }
}

void SlabOperator::apply_spd(comm::Comm& comm, std::span<const double> y, std::span<double> out, int tag) const {
  const std::size_t n2 = grid_.n2();
  const std::size_t m = width_;
  if (y.size() != m * n2 || out.size() != m * n2) throw Error(Errc::DimensionMismatch, "slab vector length");
  std::vector<double> west(n2, 0.0), east(n2, 0.0), edge(n2);
  // Post both outgoing edges before waiting on either neighbour.
  if (rank_ > 1) {
    for (std::size_t k = 0; k < n2; ++k) edge[k] = y[k * m];
    comm.send(rank_ - 1, tag, edge);
  }
  if (rank_ < ranks_) {
    for (std::size_t k = 0; k < n2; ++k) edge[k] = y[k * m + m - 1];
    comm.send(rank_ + 1, tag, edge);
  }
  if (rank_ > 1) west = comm.recv(rank_ - 1, tag);
  if (rank_ < ranks_) east = comm.recv(rank_ + 1, tag);

  const double ih1 = 1.0 / (grid_.h1() * grid_.h1());
  const double ih2 = 1.0 / (grid_.h2() * grid_.h2());
  for (std::size_t k = 0; k < n2; ++k) {
    const double* yc = y.data() + k * m;
    const double* ys = k > 0 ? yc - m : nullptr;
    const double* yn = k + 1 < n2 ? yc + m : nullptr;
    const double* a1 = a1_.data() + k * (m + 1);  // a1[j] is the west face of column j
    const double* a2 = a2_.data() + k * m;
    const double* a2s = k > 0 ? a2 - m : nullptr;
    for (std::size_t j = 0; j < m; ++j) {
      const double yw = j > 0 ? yc[j - 1] : west[k];
      const double ye = j + 1 < m ? yc[j + 1] : east[k];
      const double vs = ys ? ys[j] : 0.0;
      const double vn = yn ? yn[j] : 0.0;
      const double as = a2s ? a2s[j] : 0.0;
      out[k * m + j] = -stencil(yc[j], yw, ye, vs, vn, a1[j], a1[j + 1], as, a2[j], w_[k * m + j], ih1, ih2);
    }
  }
}

void SlabOperator::scatter(std::span<const double> global, std::span<double> local) const {
  for (std::size_t k = 1; k <= grid_.n2(); ++k) {
    std::copy_n(global.begin() + static_cast<std::ptrdiff_t>(grid_.index(first_, k)), width_,
                local.begin() + static_cast<std::ptrdiff_t>((k - 1) * width_));
  }
}

void SlabOperator::gather(std::span<const double> local, std::span<double> global) const {
  for (std::size_t k = 1; k <= grid_.n2(); ++k) {
    std::copy_n(local.begin() + static_cast<std::ptrdiff_t>((k - 1) * width_), width_,
                global.begin() + static_cast<std::ptrdiff_t>(grid_.index(first_, k)));
  }
}

}  // namespace axisolve
