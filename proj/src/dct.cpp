#include "axisolve/dct.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "axisolve/error.hpp"

namespace axisolve {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(Errc::DimensionMismatch,
                std::string(what) + " has length " + std::to_string(got) + ", expected " + std::to_string(want));
  }
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (!is_power_of_two(n)) {
    throw Error(Errc::DomainError, "FFT length must be a power of two, got " + std::to_string(n));
  }
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  reversed_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) {
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    }
    reversed_[i] = r;
  }
  twiddle_.resize(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    twiddle_[j] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
  }
}

void Fft::forward(std::span<std::complex<double>> data) const { run(data, false); }
void Fft::backward(std::span<std::complex<double>> data) const { run(data, true); }

void Fft::run(std::span<std::complex<double>> data, bool inverse) const {
  require_size(data.size(), n_, "FFT input");
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j = reversed_[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const std::complex<double> w = inverse ? std::conj(twiddle_[j * step]) : twiddle_[j * step];
        const std::complex<double> u = data[start + j];
        const std::complex<double> v = data[start + j + half] * w;
        data[start + j] = u + v;
        data[start + j + half] = u - v;
      }
    }
  }
}

CosineTransform::CosineTransform(std::size_t n) : n_(n) {
  if (n == 0) throw Error(Errc::DomainError, "cosine transform needs at least one point");
  scale_ = std::sqrt(2.0 / static_cast<double>(n));
  const double nn = static_cast<double>(n);
  if (is_power_of_two(n)) {
    fft_.emplace(n);
    shift_.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
      shift_[m] = std::polar(1.0, -std::numbers::pi * static_cast<double>(m) / (2.0 * nn));
    }
  } else {
    table_.resize(n * n);
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t k = 0; k < n; ++k) {
        table_[m * n + k] = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.5) * static_cast<double>(m) / nn);
      }
    }
  }
}

void CosineTransform::forward(std::span<const double> in, std::span<double> out,
                              std::span<std::complex<double>> scratch) const {
  require_size(in.size(), n_, "cosine transform input");
  require_size(out.size(), n_, "cosine transform output");
  if (!fft_) {
    std::vector<double> result(n_);
    for (std::size_t m = 0; m < n_; ++m) {
      const double* row = table_.data() + m * n_;
      double sum = 0.0;
      for (std::size_t k = 0; k < n_; ++k) sum += in[k] * row[k];
      result[m] = scale_ * sum;
    }
    std::copy(result.begin(), result.end(), out.begin());
    return;
  }
  require_size(scratch.size(), n_, "cosine transform scratch");
  // v_n = x_{2n}, v_{N-1-n} = x_{2n+1}; X_m = Re(exp(-i pi m / 2N) V_m)
  const std::size_t half = (n_ + 1) / 2;
  for (std::size_t j = 0; j < half; ++j) scratch[j] = in[2 * j];
  for (std::size_t j = 0; j < n_ / 2; ++j) scratch[n_ - 1 - j] = in[2 * j + 1];
  fft_->forward(scratch);
  for (std::size_t m = 0; m < n_; ++m) out[m] = scale_ * (shift_[m] * scratch[m]).real();
}

void CosineTransform::inverse(std::span<const double> in, std::span<double> out,
                              std::span<std::complex<double>> scratch) const {
  require_size(in.size(), n_, "cosine transform input");
  require_size(out.size(), n_, "cosine transform output");
  if (!fft_) {
    std::vector<double> result(n_, 0.0);
    for (std::size_t m = 0; m < n_; ++m) {
      const double* row = table_.data() + m * n_;
      const double coeff = m == 0 ? 0.5 * in[0] : in[m];
      for (std::size_t k = 0; k < n_; ++k) result[k] += coeff * row[k];
    }
    for (std::size_t k = 0; k < n_; ++k) out[k] = scale_ * result[k];
    return;
  }
  require_size(scratch.size(), n_, "cosine transform scratch");
  // Undo the forward steps: V_m = exp(i pi m / 2N)(X_m - i X_{N-m}), v = IFFT(V).
  scratch[0] = in[0];
  for (std::size_t m = 1; m < n_; ++m) {
    scratch[m] = std::conj(shift_[m]) * std::complex<double>(in[m], -in[n_ - m]);
  }
  fft_->backward(scratch);
  // The exact inverse divides by N; the pair's normalization multiplies by N/2.
  const double factor = scale_ * 0.5;
  const std::size_t half = (n_ + 1) / 2;
  for (std::size_t j = 0; j < half; ++j) out[2 * j] = factor * scratch[j].real();
  for (std::size_t j = 0; j < n_ / 2; ++j) out[2 * j + 1] = factor * scratch[n_ - 1 - j].real();
}

std::vector<double> CosineTransform::forward(std::span<const double> in) const {
  std::vector<double> out(n_);
  std::vector<std::complex<double>> scratch(n_);
  forward(in, out, scratch);
  return out;
}

std::vector<double> CosineTransform::inverse(std::span<const double> in) const {
  std::vector<double> out(n_);
  std::vector<std::complex<double>> scratch(n_);
  inverse(in, out, scratch);
  return out;
}

}  // namespace axisolve
