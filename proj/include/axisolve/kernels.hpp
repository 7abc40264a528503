#pragma once

#include <cstddef>
#include <span>

namespace axisolve::kernels {

/// Data-parallel loops run either through OpenMP or through the plain serial loop kept as the
/// reference. Both produce bit-identical results; the serial path is what tests compare against.
enum class Mode { Serial, OpenMP };

void set_mode(Mode mode) noexcept;
[[nodiscard]] Mode mode() noexcept;
[[nodiscard]] bool parallel() noexcept;

/// Restores the previous mode on scope exit.
class ScopedMode {
 public:
  explicit ScopedMode(Mode m) noexcept : saved_(mode()) { set_mode(m); }
  ~ScopedMode() { set_mode(saved_); }
  ScopedMode(const ScopedMode&) = delete;
  ScopedMode& operator=(const ScopedMode&) = delete;

 private:
  Mode saved_;
};

/// Sum of x[i]*y[i] accumulated in fixed chunks of kDotChunk, chunk totals added left to right.
/// The result does not depend on the mode or the thread count.
inline constexpr std::size_t kDotChunk = 4096;
[[nodiscard]] double dot(std::span<const double> x, std::span<const double> y);
[[nodiscard]] double dot_serial(std::span<const double> x, std::span<const double> y);

/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
/// y = x + b * y
void xpby(std::span<const double> x, double b, std::span<double> y);

}  // namespace axisolve::kernels
