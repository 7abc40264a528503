#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "axisolve/comm.hpp"
#include "axisolve/elliptic.hpp"
#include "axisolve/iterative.hpp"

namespace axisolve {

/// Expansion parameters: transform scale h (1/s), integer alpha >= 2, series length.
struct LaguerreParams {
  double h = 300.0;
  int alpha = 5;
  std::size_t n_terms = 2000;

  /// DomainError unless h > 0, alpha >= 2, n_terms >= 1.
  void validate() const;
};

/// l^alpha_m(tau) = sqrt(h m! / (m+alpha)!) tau^(alpha/2) e^(-tau/2) L^alpha_m(tau), m < count.
/// Evaluated by the three-term recurrence on sqrt(m!/(m+alpha)!) L^alpha_m with running rescaling;
/// no factorial is formed. Zero at tau = 0. DomainError for tau < 0.
[[nodiscard]] std::vector<double> laguerre_functions(std::size_t count, int alpha, double h, double tau);
/// tau^(-alpha/2) l^alpha_m(tau): the kernel of the forward transform.
[[nodiscard]] std::vector<double> laguerre_analysis_row(std::size_t count, int alpha, double h, double tau);
/// tau^(alpha/2) l^alpha_m(tau): the weights of the inverse transform.
[[nodiscard]] std::vector<double> laguerre_synthesis_row(std::size_t count, int alpha, double h, double tau);

/// exp[-(2 pi f0 (t - t0))^2 / gamma^2] sin(2 pi f0 (t - t0))
struct Wavelet {
  double f0 = 30.0;
  double t0 = 0.2;
  double gamma = 4.0;

  [[nodiscard]] double operator()(double t) const;
  /// |t - t0| beyond which the envelope is below eps.
  [[nodiscard]] double half_width(double eps = 1e-14) const;
};

using TimeSignal = std::function<double(double t)>;

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
[[nodiscard]] GaussRule gauss_legendre(std::size_t order);

/// f_m = int_{t_lo}^{t_hi} f(t) (ht)^(-alpha/2) l^alpha_m(ht) dt by composite 16-point Gauss-Legendre,
/// doubling the panel count until no coefficient moves by more than 1e-10 of the largest.
/// QuadratureNotConverged after 2^16 panels.
[[nodiscard]] std::vector<double> project_signal(const TimeSignal& f, double t_lo, double t_hi,
                                                 const LaguerreParams& params);
/// Integrates over the wavelet's support (envelope above 1e-14, clipped at t = 0).
[[nodiscard]] std::vector<double> project_source(const Wavelet& wavelet, const LaguerreParams& params);
/// (ht)^(alpha/2) sum_m coeffs[m] l^alpha_m(ht)
[[nodiscard]] double synthesize(std::span<const double> coeffs, const LaguerreParams& params, double t);

/// Factors of the harmonic coupling sum, kept in log space:
///   sqrt(m!/(m+alpha)!) sum_{k<m} (m-k) sqrt((k+alpha)!/k!) Q_k = scale(m) * T_m
///   T_m = sum_{k<m} (m-k) weight(k) Q_k,  T_{m+1} = T_m + S_{m+1},  S_{m+1} = sum_{k<=m} weight(k) Q_k
class HarmonicWeights {
 public:
  explicit HarmonicWeights(int alpha);
  /// sqrt((k+alpha)!/k!)
  [[nodiscard]] double weight(std::size_t k) const;
  /// sqrt(m!/(m+alpha)!)
  [[nodiscard]] double scale(std::size_t m) const;
  /// scale(m) * weight(k) as one exponential.
  [[nodiscard]] double coupling(std::size_t m, std::size_t k) const;

 private:
  int alpha_;
};

/// Running sums for the right-hand sides on one vector layout.
class HarmonicAccumulator {
 public:
  HarmonicAccumulator(int alpha, std::size_t size);

  /// Index of the next harmonic whose coupling term is available.
  [[nodiscard]] std::size_t next() const noexcept { return next_; }
  /// sqrt(m!/(m+alpha)!) sum_{k<m} (m-k) sqrt((k+alpha)!/k!) Q_k for m = next().
  [[nodiscard]] std::vector<double> coupling() const;
  /// Adds Q_m for m = next() and advances.
  void push(std::span<const double> q);

 private:
  HarmonicWeights weights_;
  std::size_t next_ = 0;
  std::vector<double> s_;  // sum_{k<next} weight(k) Q_k
  std::vector<double> t_;  // sum_{k<next} (next-k) weight(k) Q_k
};

/// Acoustic medium: V_s enters as the diffusion coefficient and rho through 1/rho^2, both
/// exactly as sampled.
struct MediumModel {
  Field velocity;  // V_s > 0
  Field density;   // rho > 0
};

enum class ShiftMode { Acoustic, Average };

struct AcousticOptions {
  SolverKind solver = SolverKind::Pcg;
  BoundsMode bounds = BoundsMode::Lanczos;
  ShiftMode shift = ShiftMode::Acoustic;
  double vtilde = 0.0;  // <= 0 selects (min V_s + max V_s) / 2
  double tol = 1e-10;
  std::size_t max_iter = 500;
  std::size_t check_every = 8;
  int ranks = 1;  // r-slabs; 1 runs the serial kernels
  comm::ExecutorKind executor = comm::ExecutorKind::Simulator;
  double source_r = 0.0;
  double source_z = 0.0;
};

/// Node receiving the point source and its weight in the scaled right-hand side.
struct SourceNode {
  std::size_t i = 1;
  std::size_t k = 1;
  double weight = 0.0;  // 1 / (2 pi h1 h2): the delta 1/(2 pi r h1 h2) times r
};
[[nodiscard]] SourceNode source_node(const Grid2D& grid, double r, double z);

struct LaguerreSeries {
  Grid2D grid;
  LaguerreParams params;
  std::vector<double> source_coefficients;     // f_m
  std::vector<std::vector<double>> harmonics;  // Q_m on the unknowns
  std::vector<std::size_t> iterations;         // per harmonic
  std::vector<std::uint64_t> operator_checksums;
  std::size_t preconditioner_applications = 0;  // M_Delta over all harmonics
  SpectralBounds bounds;                        // used by Chebyshev; zero for PCG
  double vtilde = 0.0;                          // preconditioner coefficient as resolved
  double shift = 0.0;
  comm::CommStats comm_stats;

  /// ||Q_m||_2 per harmonic.
  [[nodiscard]] std::vector<double> harmonic_norms() const;
  /// Share of sum ||Q_m||^2 carried by the last 5% of the harmonics (at least one).
  [[nodiscard]] double tail_energy() const;
};

/// Assembles the harmonic operator: kappa = V_s, q = h^2 / (4 rho^2).
[[nodiscard]] DiscreteOperator acoustic_operator(const Grid2D& grid, const MediumModel& model,
                                                 const LaguerreParams& params);

/// Hash of the operator arrays a1, a2, w.
[[nodiscard]] std::uint64_t operator_checksum(const DiscreteOperator& op);

/// Solves the harmonics m = 0..n_terms-1 in order with one operator and one preconditioner.
/// Errors from the iterative solver are rethrown with the harmonic index in the message.
[[nodiscard]] LaguerreSeries solve_all_harmonics(const Grid2D& grid, const MediumModel& model,
                                                 const LaguerreParams& params, const Wavelet& wavelet,
                                                 const AcousticOptions& options = {});
/// Same with precomputed source coefficients.
[[nodiscard]] LaguerreSeries solve_all_harmonics(const Grid2D& grid, const MediumModel& model,
                                                 const LaguerreParams& params, std::vector<double> source_coefficients,
                                                 const AcousticOptions& options = {});

struct Receiver {
  double r = 0.0;
  double z = 0.0;
};

/// Nearest unknown (i in 1..N1-1, k in 1..N2).
[[nodiscard]] std::size_t nearest_unknown(const Grid2D& grid, double r, double z);

/// u(x, t) at every (t, receiver): values[t_index * receivers + j].
struct Seismogram {
  std::vector<double> times;
  std::vector<Receiver> receivers;
  std::vector<double> values;

  /// Header `t,u(x1),u(x2),...`
  void write_csv(std::ostream& out) const;
};

[[nodiscard]] Seismogram reconstruct(const LaguerreSeries& series, std::span<const double> times,
                                     std::span<const Receiver> receivers);
/// u(., t) on all unknowns.
[[nodiscard]] std::vector<double> reconstruct_field(const LaguerreSeries& series, double t);

}  // namespace axisolve
