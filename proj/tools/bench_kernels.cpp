// Serial reference loops against their OpenMP counterparts on one grid size.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include <omp.h>

#include "axisolve/elliptic.hpp"
#include "axisolve/kernels.hpp"
#include "axisolve/sov.hpp"

using namespace axisolve;

namespace {

double best_of(int repeats, const std::function<void()>& body) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    body();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

void row(const char* name, int repeats, const std::function<void()>& body) {
  double t[2];
  for (int m = 0; m < 2; ++m) {
    const kernels::ScopedMode mode(m == 0 ? kernels::Mode::Serial : kernels::Mode::OpenMP);
    body();
    t[m] = best_of(repeats, body);
  }
  std::printf("%-16s %12.6f %12.6f %8.2f\n", name, t[0], t[1], t[0] / t[1]);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 512;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
  const Grid2D grid(n, n, 1.0, 1.0);
  const CoefficientFields fields{[](double r, double z) { return 1.5 + 0.5 * std::sin(r) * std::cos(z); },
                                 [](double, double) { return 0.25; }};
  const DiscreteOperator op = assemble(grid, fields, nullptr);
  const SovPreconditioner pre(grid, 1.5, 0.25, std::nullopt);
  std::vector<double> x(grid.unknowns());
  std::vector<double> y(grid.unknowns());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::sin(0.001 * static_cast<double>(j));

  std::printf("grid %zux%zu, %d OpenMP threads\n", n, n, omp_get_max_threads());
  std::printf("%-16s %12s %12s %8s\n", "kernel", "serial_s", "openmp_s", "speedup");
  volatile double sink = 0.0;
  row("dot", repeats, [&] { sink = kernels::dot(x, x); });
  row("axpy", repeats, [&] { kernels::axpy(1e-9, x, y); });
  row("xpby", repeats, [&] { kernels::xpby(x, 0.5, y); });
  row("apply_A", repeats, [&] { apply_A(op, x, y); });
  row("sov_inverse", repeats, [&] { pre.apply_inverse(x, y); });
  (void)sink;
  return 0;
}
