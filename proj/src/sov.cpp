#include "axisolve/sov.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "axisolve/error.hpp"
#include "axisolve/kernels.hpp"

namespace axisolve {

double vtilde_from_bounds(const CoefficientBounds& bounds) { return 0.5 * (bounds.s1 + bounds.s2); }

double average_shift(const CoefficientBounds& bounds) { return 0.5 * (bounds.d1 + bounds.d2); }

namespace {

DiscreteOperator constant_operator(const Grid2D& grid, double vtilde, double shift) {
  if (!(vtilde > 0.0)) throw Error(Errc::DomainError, "vtilde must be positive, got " + std::to_string(vtilde));
  if (!(shift >= 0.0)) throw Error(Errc::DomainError, "shift must be non-negative, got " + std::to_string(shift));
  return assemble(grid, {[vtilde](double, double) { return vtilde; }, [shift](double, double) { return shift; }},
                  nullptr);
}

}  // namespace

SovPreconditioner::SovPreconditioner(const Grid2D& grid, double vtilde, double shift,
                                     std::optional<Partition> partition, SovOptions options)
    : reference_(constant_operator(grid, vtilde, shift)),
      vtilde_(vtilde),
      shift_(shift),
      transform_(grid.n2()),
      partition_(std::move(partition)) {
  const std::size_t m = grid.line();
  const std::size_t n2 = grid.n2();
  if (partition_ && partition_->order() != m) {
    throw Error(Errc::InvalidPartition, "partition covers " + std::to_string(partition_->order()) +
                                            " points, the r-line has " + std::to_string(m));
  }
  const double ih1 = 1.0 / (grid.h1() * grid.h1());
  const double h2 = grid.h2();

  // First k-row of the reference operator carries the r-direction coefficients.
  std::vector<double> radial(m);
  std::vector<double> lower(m - 1);
  std::vector<double> upper(m - 1);
  for (std::size_t j = 0; j < m; ++j) {
    const double west = j > 0 ? reference_.a1[j - 1] : 0.0;
    radial[j] = (reference_.a1[j] + west) * ih1 + reference_.w[j];
    if (j + 1 < m) {
      upper[j] = -reference_.a1[j] * ih1;
      lower[j] = upper[j];
    }
  }

  eigenvalues_.resize(n2);
  matrices_.reserve(n2);
  for (std::size_t l = 0; l < n2; ++l) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(l) / (2.0 * static_cast<double>(n2)));
    eigenvalues_[l] = 4.0 * s * s / (h2 * h2);
    std::vector<double> diag(m);
    for (std::size_t j = 0; j < m; ++j) diag[j] = radial[j] + grid.r(j + 1) * vtilde_ * eigenvalues_[l];
    matrices_.emplace_back(lower, std::move(diag), upper);
  }
  factors_.resize(n2);
  for (std::size_t l = 0; l < n2; ++l) factors_[l] = ThomasFactorization(matrices_[l]);

  if (partition_) {
    plans_ = std::make_unique<PlanSlot[]>(n2);
    if (!options.lazy_plans) {
      for (std::size_t l = 1; l <= n2; ++l) (void)plan(l);
    }
  }
}

double SovPreconditioner::eigenvalue(std::size_t l) const {
  if (l < 1 || l > modes()) throw Error(Errc::IndexOutOfRange, "mode " + std::to_string(l));
  return eigenvalues_[l - 1];
}

const TridiagonalMatrix& SovPreconditioner::mode_matrix(std::size_t l) const {
  if (l < 1 || l > modes()) throw Error(Errc::IndexOutOfRange, "mode " + std::to_string(l));
  return matrices_[l - 1];
}

const DichotomyPlan& SovPreconditioner::plan(std::size_t l) const {
  if (!partition_) throw Error(Errc::DomainError, "preconditioner was built without an r-partition");
  if (l < 1 || l > modes()) throw Error(Errc::IndexOutOfRange, "mode " + std::to_string(l));
  PlanSlot& slot = plans_[l - 1];
  std::call_once(slot.once, [&] { slot.plan.emplace(build_plan(matrices_[l - 1], *partition_)); });
  return *slot.plan;
}

std::size_t SovPreconditioner::plans_built() const {
  if (!plans_) return 0;
  std::size_t count = 0;
  for (std::size_t l = 0; l < modes(); ++l) count += plans_[l].plan.has_value() ? 1 : 0;
  return count;
}

void SovPreconditioner::apply(std::span<const double> y, std::span<double> out) const {
  apply_spd(reference_, y, out);
}

void SovPreconditioner::transform_columns(std::span<double> data, std::size_t width, bool forward) const {
  const std::size_t n2 = modes();
  const auto columns = static_cast<long>(width);
#pragma omp parallel if (kernels::parallel())
  {
    std::vector<double> line(n2);
    std::vector<std::complex<double>> scratch(n2);
#pragma omp for schedule(static)
    for (long c = 0; c < columns; ++c) {
      const auto col = static_cast<std::size_t>(c);
      for (std::size_t k = 0; k < n2; ++k) line[k] = data[k * width + col];
      if (forward) {
        transform_.forward(line, line, scratch);
      } else {
        transform_.inverse(line, line, scratch);
      }
      for (std::size_t k = 0; k < n2; ++k) data[k * width + col] = line[k];
    }
  }
}

void SovPreconditioner::apply_inverse(std::span<const double> f, std::span<double> y) const {
  const std::size_t n = grid().unknowns();
  if (f.size() != n || y.size() != n) {
    throw Error(Errc::DimensionMismatch, "grid vector of length " + std::to_string(f.size()) + ", expected " +
                                             std::to_string(n));
  }
  const std::size_t m = grid().line();
  if (f.data() != y.data()) std::copy(f.begin(), f.end(), y.begin());
  transform_columns(y, m, true);
  const auto n2 = static_cast<long>(modes());
#pragma omp parallel for schedule(static) if (kernels::parallel())
  for (long l = 0; l < n2; ++l) {
    const std::span<double> row = y.subspan(static_cast<std::size_t>(l) * m, m);
    factors_[static_cast<std::size_t>(l)].solve(row, row);
  }
  transform_columns(y, m, false);
}

std::vector<double> SovPreconditioner::apply_inverse(std::span<const double> f) const {
  std::vector<double> y(f.size());
  apply_inverse(f, y);
  return y;
}

void SovPreconditioner::apply_inverse_on_rank(comm::Comm& comm, std::span<const double> f_local,
                                              std::span<double> y_local, DichotomyTrace* trace) const {
  if (!partition_) throw Error(Errc::DomainError, "preconditioner was built without an r-partition");
  if (partition_->ranks() != comm.size()) {
    throw Error(Errc::InvalidPartition, "partition has " + std::to_string(partition_->ranks()) + " ranks, world has " +
                                            std::to_string(comm.size()));
  }
  const std::size_t width = partition_->size(comm.rank());
  const std::size_t n2 = modes();
  if (f_local.size() != width * n2 || y_local.size() != width * n2) {
    throw Error(Errc::DimensionMismatch, "slab vector of length " + std::to_string(f_local.size()) + ", expected " +
                                             std::to_string(width * n2));
  }
  std::vector<double> modal(f_local.begin(), f_local.end());
  transform_columns(modal, width, true);
  std::vector<LocalSystem> systems(n2);
  for (std::size_t l = 0; l < n2; ++l) {
    systems[l] = {&plan(l + 1), std::span<const double>(modal).subspan(l * width, width),
                  y_local.subspan(l * width, width), 1};
  }
  solve_on_rank(comm, systems, trace);
  transform_columns(y_local, width, false);
}

}  // namespace axisolve
