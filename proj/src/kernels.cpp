#include "axisolve/kernels.hpp"

#include <atomic>
#include <vector>

#include "axisolve/error.hpp"

namespace axisolve::kernels {

namespace {
std::atomic<Mode> g_mode{Mode::OpenMP};

double chunk_dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}
}  // namespace

void set_mode(Mode m) noexcept { g_mode.store(m, std::memory_order_relaxed); }
Mode mode() noexcept { return g_mode.load(std::memory_order_relaxed); }
bool parallel() noexcept { return mode() == Mode::OpenMP; }

double dot_serial(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::DimensionMismatch, "dot of vectors with different lengths");
  double total = 0.0;
  for (std::size_t lo = 0; lo < x.size(); lo += kDotChunk) {
    const std::size_t len = std::min(kDotChunk, x.size() - lo);
    total += chunk_dot(x.data() + lo, y.data() + lo, len);
  }
  return total;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (!parallel() || x.size() <= kDotChunk) return dot_serial(x, y);
  if (x.size() != y.size()) throw Error(Errc::DimensionMismatch, "dot of vectors with different lengths");
  const auto chunks = static_cast<long>((x.size() + kDotChunk - 1) / kDotChunk);
  std::vector<double> partial(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(static)
  for (long c = 0; c < chunks; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kDotChunk;
    const std::size_t len = std::min(kDotChunk, x.size() - lo);
    partial[static_cast<std::size_t>(c)] = chunk_dot(x.data() + lo, y.data() + lo, len);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw Error(Errc::DimensionMismatch, "axpy of vectors with different lengths");
  const auto n = static_cast<long>(x.size());
#pragma omp parallel for schedule(static) if (parallel() && n > 16384)
  for (long i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += a * x[static_cast<std::size_t>(i)];
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
  if (x.size() != y.size()) throw Error(Errc::DimensionMismatch, "xpby of vectors with different lengths");
  const auto n = static_cast<long>(x.size());
#pragma omp parallel for schedule(static) if (parallel() && n > 16384)
  for (long i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(i);
    y[j] = x[j] + b * y[j];
  }
}

}  // namespace axisolve::kernels
