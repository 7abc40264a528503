#include "axisolve/laguerre.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>

#include "axisolve/error.hpp"
#include "axisolve/kernels.hpp"
#include "axisolve/sov.hpp"

namespace axisolve {

namespace {

constexpr double kRescale = 1e150;
constexpr std::size_t kGaussOrder = 16;
constexpr std::size_t kMinPanels = 64;
constexpr std::size_t kMaxPanels = std::size_t{1} << 16;

// out[m] = exp(log_prefactor) * sqrt(m!/(m+alpha)!) L^alpha_m(tau).
void scaled_row(std::size_t count, int alpha, double tau, double log_prefactor, std::span<double> out) {
  const double a = alpha;
  const double base = log_prefactor - 0.5 * std::lgamma(a + 1.0);
  double log_scale = 0.0;
  double factor = std::exp(base);
  double prev = 0.0;
  double cur = 1.0;
  out[0] = factor * cur;
  for (std::size_t m = 0; m + 1 < count; ++m) {
    const double md = static_cast<double>(m);
    const double next =
        ((2.0 * md + a + 1.0 - tau) * cur - std::sqrt(md * (md + a)) * prev) / std::sqrt((md + 1.0) * (md + a + 1.0));
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += std::log(kRescale);
      if (base + log_scale > 690.0) {
        throw Error(Errc::Overflow, "Laguerre recurrence at tau = " + std::to_string(tau) + ", m = " + std::to_string(m));
      }
      factor = std::exp(base + log_scale);
    }
    out[m + 1] = factor * cur;
  }
}

void check_row_args(std::size_t count, int alpha, double h, double tau) {
  LaguerreParams{h, alpha, count}.validate();
  if (!(tau >= 0.0)) throw Error(Errc::DomainError, "tau must be non-negative, got " + std::to_string(tau));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void LaguerreParams::validate() const {
  if (!(h > 0.0)) throw Error(Errc::DomainError, "Laguerre scale h must be positive");
  if (alpha < 2) throw Error(Errc::DomainError, "Laguerre alpha must be an integer >= 2");
  if (n_terms < 1) throw Error(Errc::DomainError, "Laguerre series needs at least one term");
}

std::vector<double> laguerre_functions(std::size_t count, int alpha, double h, double tau) {
  check_row_args(count, alpha, h, tau);
  std::vector<double> out(count, 0.0);
  if (tau == 0.0) return out;
  scaled_row(count, alpha, tau, 0.5 * std::log(h) + 0.5 * alpha * std::log(tau) - 0.5 * tau, out);
  return out;
}

std::vector<double> laguerre_analysis_row(std::size_t count, int alpha, double h, double tau) {
  check_row_args(count, alpha, h, tau);
  std::vector<double> out(count);
  scaled_row(count, alpha, tau, 0.5 * std::log(h) - 0.5 * tau, out);
  return out;
}

std::vector<double> laguerre_synthesis_row(std::size_t count, int alpha, double h, double tau) {
  check_row_args(count, alpha, h, tau);
  std::vector<double> out(count, 0.0);
  if (tau == 0.0) return out;
  scaled_row(count, alpha, tau, 0.5 * std::log(h) + alpha * std::log(tau) - 0.5 * tau, out);
  return out;
}

double Wavelet::operator()(double t) const {
  const double phase = 2.0 * std::numbers::pi * f0 * (t - t0);
  return std::exp(-(phase * phase) / (gamma * gamma)) * std::sin(phase);
}

double Wavelet::half_width(double eps) const {
  if (!(f0 > 0.0)) throw Error(Errc::DomainError, "wavelet frequency must be positive");
  return gamma * std::sqrt(-std::log(eps)) / (2.0 * std::numbers::pi * f0);
}

GaussRule gauss_legendre(std::size_t order) {
  if (order == 0) throw Error(Errc::DomainError, "Gauss-Legendre order must be positive");
  GaussRule rule{std::vector<double>(order), std::vector<double>(order)};
  const double n = static_cast<double>(order);
  for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[order - 1 - i] = x;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

std::vector<double> project_signal(const TimeSignal& f, double t_lo, double t_hi, const LaguerreParams& params) {
  params.validate();
  if (!(t_lo >= 0.0) || !(t_hi > t_lo)) {
    throw Error(Errc::DomainError, "projection interval [" + fmt(t_lo) + ", " + fmt(t_hi) + "]");
  }
  const GaussRule rule = gauss_legendre(kGaussOrder);
  const std::size_t n = params.n_terms;
  auto integrate = [&](std::size_t panels) {
    std::vector<double> acc(n, 0.0);
    std::vector<double> row(n);
    const double width = (t_hi - t_lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = t_lo + (static_cast<double>(p) + 0.5) * width;
      for (std::size_t q = 0; q < kGaussOrder; ++q) {
        const double t = mid + 0.5 * width * rule.nodes[q];
        const double ft = f(t);
        if (ft == 0.0) continue;
        scaled_row(n, params.alpha, params.h * t, 0.5 * std::log(params.h) - 0.5 * params.h * t, row);
        const double wt = 0.5 * width * rule.weights[q] * ft;
        for (std::size_t m = 0; m < n; ++m) acc[m] += wt * row[m];
      }
    }
    return acc;
  };
  std::vector<double> coarse = integrate(kMinPanels);
  for (std::size_t panels = 2 * kMinPanels; panels <= kMaxPanels; panels *= 2) {
    std::vector<double> fine = integrate(panels);
    double scale = 0.0;
    double change = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      scale = std::max(scale, std::abs(fine[m]));
      change = std::max(change, std::abs(fine[m] - coarse[m]));
    }
    if (change <= 1e-10 * scale) return fine;
    coarse = std::move(fine);
  }
  throw Error(Errc::QuadratureNotConverged,
              "Laguerre coefficients still moving after " + std::to_string(kMaxPanels) + " panels");
}

std::vector<double> project_source(const Wavelet& wavelet, const LaguerreParams& params) {
  const double w = wavelet.half_width();
  const double lo = std::max(0.0, wavelet.t0 - w);
  const double hi = wavelet.t0 + w;
  if (hi <= 0.0) return std::vector<double>(params.n_terms, 0.0);
  return project_signal([&](double t) { return wavelet(t); }, lo, hi, params);
}

double synthesize(std::span<const double> coeffs, const LaguerreParams& params, double t) {
  const auto row = laguerre_synthesis_row(coeffs.size(), params.alpha, params.h, params.h * t);
  double s = 0.0;
  for (std::size_t m = 0; m < coeffs.size(); ++m) s += coeffs[m] * row[m];
  return s;
}

HarmonicWeights::HarmonicWeights(int alpha) : alpha_(alpha) {
  if (alpha < 2) throw Error(Errc::DomainError, "Laguerre alpha must be an integer >= 2");
}

double HarmonicWeights::weight(std::size_t k) const {
  const double kd = static_cast<double>(k);
  return std::exp(0.5 * (std::lgamma(kd + alpha_ + 1.0) - std::lgamma(kd + 1.0)));
}

double HarmonicWeights::scale(std::size_t m) const {
  const double md = static_cast<double>(m);
  return std::exp(0.5 * (std::lgamma(md + 1.0) - std::lgamma(md + alpha_ + 1.0)));
}

double HarmonicWeights::coupling(std::size_t m, std::size_t k) const {
  const double md = static_cast<double>(m);
  const double kd = static_cast<double>(k);
  return std::exp(0.5 * (std::lgamma(md + 1.0) - std::lgamma(md + alpha_ + 1.0) + std::lgamma(kd + alpha_ + 1.0) -
                         std::lgamma(kd + 1.0)));
}

HarmonicAccumulator::HarmonicAccumulator(int alpha, std::size_t size) : weights_(alpha), s_(size, 0.0), t_(size, 0.0) {}

std::vector<double> HarmonicAccumulator::coupling() const {
  const double c = weights_.scale(next_);
  std::vector<double> out(t_.size());
  for (std::size_t i = 0; i < t_.size(); ++i) out[i] = c * t_[i];
  return out;
}

void HarmonicAccumulator::push(std::span<const double> q) {
  if (q.size() != s_.size()) throw Error(Errc::DimensionMismatch, "harmonic of the wrong length");
  const double w = weights_.weight(next_);
  for (std::size_t i = 0; i < s_.size(); ++i) {
    s_[i] += w * q[i];
    t_[i] += s_[i];
  }
  ++next_;
}

SourceNode source_node(const Grid2D& grid, double r, double z) {
  const std::size_t idx = nearest_unknown(grid, r, z);
  return {idx % grid.line() + 1, idx / grid.line() + 1, 1.0 / (2.0 * std::numbers::pi * grid.h1() * grid.h2())};
}

std::size_t nearest_unknown(const Grid2D& grid, double r, double z) {
  auto snap = [](double x, double h, std::size_t hi) {
    const double pos = std::round(x / h + 0.5);
    return static_cast<std::size_t>(std::clamp(pos, 1.0, static_cast<double>(hi)));
  };
  return grid.index(snap(r, grid.h1(), grid.line()), snap(z, grid.h2(), grid.n2()));
}

std::vector<double> LaguerreSeries::harmonic_norms() const {
  std::vector<double> norms;
  norms.reserve(harmonics.size());
  for (const auto& q : harmonics) norms.push_back(std::sqrt(kernels::dot_serial(q, q)));
  return norms;
}

double LaguerreSeries::tail_energy() const {
  const auto norms = harmonic_norms();
  if (norms.empty()) return 0.0;
  const std::size_t tail = std::max<std::size_t>(1, norms.size() / 20);
  double total = 0.0;
  double end = 0.0;
  for (std::size_t m = 0; m < norms.size(); ++m) {
    total += norms[m] * norms[m];
    if (m + tail >= norms.size()) end += norms[m] * norms[m];
  }
  return total == 0.0 ? 0.0 : end / total;
}

DiscreteOperator acoustic_operator(const Grid2D& grid, const MediumModel& model, const LaguerreParams& params) {
  params.validate();
  const double h2 = params.h * params.h;
  const Field density = model.density;
  return assemble(grid,
                  {model.velocity,
                   [density, h2](double r, double z) {
                     const double rho = density(r, z);
                     if (!(rho > 0.0)) {
                       throw Error(Errc::NonPositiveCoefficient, "density " + fmt(rho) + " at r = " + fmt(r) +
                                                                     ", z = " + fmt(z));
                     }
                     return h2 / (4.0 * rho * rho);
                   }},
                  nullptr);
}

std::uint64_t operator_checksum(const DiscreteOperator& op) {
  std::uint64_t hash = 1469598103934665603ULL;
  auto mix = [&hash](const std::vector<double>& v) {
    for (double x : v) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &x, sizeof bits);
      for (int b = 0; b < 8; ++b) {
        hash ^= (bits >> (8 * b)) & 0xffU;
        hash *= 1099511628211ULL;
      }
    }
  };
  mix(op.a1);
  mix(op.a2);
  mix(op.w);
  return hash;
}

namespace {

// Everything one participant needs to march through the harmonics on its part of the grid.
struct LocalProblem {
  std::vector<double> coupling_coef;  // r h^2 / rho^2 on the local unknowns
  std::optional<std::size_t> source_index;
  double source_weight = 0.0;
  LinearOp apply_a;
  LinearOp apply_binv;
  InnerProduct dot;
};

using HarmonicSink = std::function<void(std::size_t m, std::span<const double> q, const IterationReport& report)>;

[[noreturn]] void rethrow_with_harmonic(const Error& e, std::size_t m) {
  std::string what = e.what();
  const auto colon = what.find(": ");
  if (colon != std::string::npos) what = what.substr(colon + 2);
  throw Error(e.code(), "harmonic " + std::to_string(m) + ": " + what);
}

void march(const LocalProblem& lp, const LaguerreParams& params, std::span<const double> source,
           const AcousticOptions& options, const SpectralBounds& bounds, const HarmonicSink& sink) {
  const std::size_t size = lp.coupling_coef.size();
  HarmonicAccumulator acc(params.alpha, size);
  std::vector<double> rhs(size);
  SolverOptions so;
  so.tol = options.tol;
  so.max_iter = options.max_iter;
  so.check_every = options.check_every;
  so.dot = lp.dot;
  for (std::size_t m = 0; m < params.n_terms; ++m) {
    const auto c = acc.coupling();
    for (std::size_t i = 0; i < size; ++i) rhs[i] = -lp.coupling_coef[i] * c[i];
    if (lp.source_index) rhs[*lp.source_index] += lp.source_weight * source[m];
    SolveResult res;
    try {
      res = options.solver == SolverKind::Pcg ? pcg_solve(lp.apply_a, lp.apply_binv, rhs, so)
                                              : chebyshev_solve(lp.apply_a, lp.apply_binv, rhs, bounds, so);
    } catch (const Error& e) {
      rethrow_with_harmonic(e, m);
    }
    acc.push(res.x);
    sink(m, res.x, res.report);
  }
}

}  // namespace

LaguerreSeries solve_all_harmonics(const Grid2D& grid, const MediumModel& model, const LaguerreParams& params,
                                   const Wavelet& wavelet, const AcousticOptions& options) {
  return solve_all_harmonics(grid, model, params, project_source(wavelet, params), options);
}

LaguerreSeries solve_all_harmonics(const Grid2D& grid, const MediumModel& model, const LaguerreParams& params,
                                   std::vector<double> source_coefficients, const AcousticOptions& options) {
  params.validate();
  if (source_coefficients.size() != params.n_terms) {
    throw Error(Errc::DimensionMismatch, std::to_string(source_coefficients.size()) + " source coefficients for " +
                                             std::to_string(params.n_terms) + " harmonics");
  }
  if (options.ranks < 1) throw Error(Errc::DomainError, "ranks must be at least 1");

  const DiscreteOperator op = acoustic_operator(grid, model, params);
  const std::uint64_t checksum = operator_checksum(op);
  const double vtilde = options.vtilde > 0.0 ? options.vtilde : vtilde_from_bounds(op.bounds);
  const double shift = options.shift == ShiftMode::Acoustic
                           ? params.h * (std::sqrt(op.bounds.d1) + std::sqrt(op.bounds.d2)) / 4.0
                           : average_shift(op.bounds);
  std::optional<Partition> partition;
  if (options.ranks > 1) partition = Partition::balanced(grid.line(), options.ranks);
  const SovPreconditioner pre(grid, vtilde, shift, partition);

  LaguerreSeries series{grid, params, std::move(source_coefficients), {}, {}, {}, 0, {}, vtilde, shift, {}};
  series.harmonics.assign(params.n_terms, std::vector<double>(grid.unknowns(), 0.0));
  series.iterations.resize(params.n_terms);
  series.operator_checksums.resize(params.n_terms);

  const LinearOp serial_a = [&op](std::span<const double> in, std::span<double> out) { apply_spd(op, in, out); };
  const LinearOp serial_binv = [&pre](std::span<const double> in, std::span<double> out) {
    pre.apply_inverse(in, out);
  };
  if (options.solver == SolverKind::Chebyshev) {
    series.bounds = options.bounds == BoundsMode::Analytic ? analytic_bounds(op.bounds, vtilde, shift)
                                                           : estimate_bounds(serial_a, serial_binv, grid.unknowns());
  }

  std::vector<double> coef(op.w.size());
  for (std::size_t i = 0; i < coef.size(); ++i) coef[i] = 4.0 * op.w[i];
  const SourceNode src = source_node(grid, options.source_r, options.source_z);

  auto record = [&](std::size_t m, const IterationReport& report) {
    series.iterations[m] = report.iterations;
    series.preconditioner_applications += report.preconditioner_applications;
    series.operator_checksums[m] = operator_checksum(op);
  };

  if (options.ranks == 1) {
    LocalProblem lp{std::move(coef), grid.index(src.i, src.k), src.weight, serial_a, serial_binv, {}};
    march(lp, params, series.source_coefficients, options, series.bounds,
          [&](std::size_t m, std::span<const double> q, const IterationReport& report) {
            std::copy(q.begin(), q.end(), series.harmonics[m].begin());
            record(m, report);
          });
    if (checksum != series.operator_checksums.back()) throw Error(Errc::DomainError, "operator changed during the run");
    return series;
  }

  comm::World world(options.ranks);
  constexpr int kHaloTag = 1;
  constexpr int kDotTag = 2;
  world.run(options.executor, [&](comm::Comm& c) {
    const SlabOperator slab(op, *partition, c.rank());
    LocalProblem lp;
    lp.coupling_coef.resize(slab.local_size());
    slab.scatter(coef, lp.coupling_coef);
    if (src.i >= slab.first() && src.i < slab.first() + slab.width()) {
      lp.source_index = (src.k - 1) * slab.width() + (src.i - slab.first());
      lp.source_weight = src.weight;
    }
    lp.apply_a = [&](std::span<const double> in, std::span<double> out) { slab.apply_spd(c, in, out, kHaloTag); };
    lp.apply_binv = [&](std::span<const double> in, std::span<double> out) { pre.apply_inverse_on_rank(c, in, out); };
    lp.dot = allreduce_dot(c, kDotTag);
    march(lp, params, series.source_coefficients, options, series.bounds,
          [&](std::size_t m, std::span<const double> q, const IterationReport& report) {
            slab.gather(q, series.harmonics[m]);
            if (c.rank() == 1) record(m, report);
          });
  });
  series.comm_stats = world.stats();
  if (checksum != series.operator_checksums.back()) throw Error(Errc::DomainError, "operator changed during the run");
  return series;
}

void Seismogram::write_csv(std::ostream& out) const {
  out << 't';
  for (std::size_t j = 0; j < receivers.size(); ++j) out << ",u(x" << j + 1 << ')';
  out << '\n';
  char buf[40];
  for (std::size_t it = 0; it < times.size(); ++it) {
    std::snprintf(buf, sizeof buf, "%.9g", times[it]);
    out << buf;
    for (std::size_t j = 0; j < receivers.size(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.12e", values[it * receivers.size() + j]);
      out << buf;
    }
    out << '\n';
  }
}

Seismogram reconstruct(const LaguerreSeries& series, std::span<const double> times, std::span<const Receiver> receivers) {
  Seismogram s{{times.begin(), times.end()}, {receivers.begin(), receivers.end()}, {}};
  s.values.assign(times.size() * receivers.size(), 0.0);
  std::vector<std::size_t> nodes;
  for (const auto& rc : receivers) nodes.push_back(nearest_unknown(series.grid, rc.r, rc.z));
  const std::size_t n = series.harmonics.size();
  for (std::size_t it = 0; it < times.size(); ++it) {
    if (!(times[it] >= 0.0)) throw Error(Errc::DomainError, "negative time sample " + fmt(times[it]));
    const auto row = laguerre_synthesis_row(n, series.params.alpha, series.params.h, series.params.h * times[it]);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      double u = 0.0;
      for (std::size_t m = 0; m < n; ++m) u += series.harmonics[m][nodes[j]] * row[m];
      s.values[it * receivers.size() + j] = u;
    }
  }
  return s;
}

std::vector<double> reconstruct_field(const LaguerreSeries& series, double t) {
  if (!(t >= 0.0)) throw Error(Errc::DomainError, "negative time " + fmt(t));
  std::vector<double> u(series.grid.unknowns(), 0.0);
  const std::size_t n = series.harmonics.size();
  const auto row = laguerre_synthesis_row(n, series.params.alpha, series.params.h, series.params.h * t);
  for (std::size_t m = 0; m < n; ++m) kernels::axpy(row[m], series.harmonics[m], u);
  return u;
}

}  // namespace axisolve
