#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace axisolve {

/// In-place radix-2 complex FFT of a fixed power-of-two length.
class Fft {
 public:
  explicit Fft(std::size_t n);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  /// X_m = sum_n x_n exp(-2 pi i m n / N)
  void forward(std::span<std::complex<double>> data) const;
  /// x_n = sum_m X_m exp(+2 pi i m n / N), unscaled
  void backward(std::span<std::complex<double>> data) const;

 private:
  void run(std::span<std::complex<double>> data, bool inverse) const;

  std::size_t n_;
  std::vector<std::size_t> reversed_;
  std::vector<std::complex<double>> twiddle_;  // exp(-2 pi i j / N), j < N/2
};

/// Cosine transform pair along a line of N points:
///   forward: F(l) = sqrt(2/N) sum_{k=1..N} f_k cos(pi (k - 1/2)(l - 1) / N)
///   inverse: y_k = sqrt(2/N) (F(1)/2 + sum_{l=2..N} F(l) cos(pi (k - 1/2)(l - 1) / N))
/// inverse(forward(f)) = f. Power-of-two N goes through an FFT of the even/odd reordered
/// line; other lengths use direct summation over a cached cosine table.
class CosineTransform {
 public:
  explicit CosineTransform(std::size_t n);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] bool fast() const noexcept { return fft_.has_value(); }

  /// `in` and `out` may alias. `scratch` needs size() complex slots on the fast path.
  void forward(std::span<const double> in, std::span<double> out, std::span<std::complex<double>> scratch) const;
  void inverse(std::span<const double> in, std::span<double> out, std::span<std::complex<double>> scratch) const;

  [[nodiscard]] std::vector<double> forward(std::span<const double> in) const;
  [[nodiscard]] std::vector<double> inverse(std::span<const double> in) const;

 private:
  std::size_t n_;
  double scale_;
  std::optional<Fft> fft_;
  std::vector<std::complex<double>> shift_;  // exp(-i pi m / (2N))
  std::vector<double> table_;                // cos(pi (k - 1/2) m / N), m-major; direct path only
};

}  // namespace axisolve
