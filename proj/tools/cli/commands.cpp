#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <utility>

#include "axisolve/comm.hpp"
#include "axisolve/dichotomy.hpp"
#include "axisolve/elliptic.hpp"
#include "axisolve/error.hpp"
#include "axisolve/kernels.hpp"
#include "axisolve/laguerre.hpp"
#include "axisolve/model_io.hpp"
#include "axisolve/solve.hpp"
#include "axisolve/sov.hpp"
#include "run_config.hpp"

namespace axisolve::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using ReportLines = std::vector<std::pair<std::string, std::string>>;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string exact_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

void write_report(const fs::path& path, const ReportLines& lines) {
  auto out = open_output(path);
  for (const auto& [k, v] : lines) out << k << " = " << v << '\n';
  finish(out, path);
}

void write_comm_stats(const fs::path& path, const comm::CommStats& stats) {
  auto out = open_output(path);
  stats.write_csv(out);
  finish(out, path);
}

void write_iterations(const fs::path& path, const IterationReport& report, bool timing) {
  auto out = open_output(path);
  out << "iter,relres,seconds\n";
  for (const auto& rec : report.history) out << rec.iter << ',' << num(rec.relres) << ',' << num(timing ? rec.seconds : 0.0) << '\n';
  finish(out, path);
}

comm::CommStats serial_stats() {
  comm::CommStats stats;
  stats.ranks.resize(1);
  return stats;
}

Grid2D make_grid(const RunConfig& c) { return Grid2D(c.grid.n1, c.grid.n2, c.grid.l1, c.grid.l2); }

/// Exact solution flat at both z-ends and zero at r = l1.
Field manufactured_profile(const Grid2D& grid) {
  const double l1 = grid.l1();
  const double l2 = grid.l2();
  return [l1, l2](double r, double z) {
    const double pi = std::numbers::pi;
    const double s = r / l1;
    return (std::cos(pi * z / l2) + 0.25 * std::cos(2.0 * pi * z / l2)) * (1.0 - s * s);
  };
}

Field constant_field(double v) {
  return [v](double, double) { return v; };
}

enum class Sign { Any, NonNegative, Positive };

Field grid_file_field(const std::string& path, const Grid2D& grid, const std::string& key, Sign sign = Sign::Any) {
  if (path.empty()) throw Error(Errc::Config, key + " is required");
  NodalGrid nodes = read_grid(path);
  nodes.check_matches(grid, key + " (" + path + ")");
  for (std::size_t k = 1; k <= nodes.n2; ++k) {
    for (std::size_t i = 1; i <= nodes.n1; ++i) {
      const double v = nodes.at(i, k);
      if ((sign == Sign::Positive && !(v > 0.0)) || (sign == Sign::NonNegative && !(v >= 0.0))) {
        throw Error(Errc::NonPositiveCoefficient, key + " has " + exact_num(v) + " at node (" + std::to_string(i) +
                                                      ", " + std::to_string(k) + ")");
      }
    }
  }
  return bilinear_field(std::move(nodes));
}

/// Nodal right-hand side for the gaussian, zero and file kinds.
Field rhs_field(const RunConfig& c, const Grid2D& grid) {
  if (c.rhs.kind == "zero") return constant_field(0.0);
  if (c.rhs.kind == "file") return grid_file_field(c.rhs.file, grid, "rhs.file");
  const double zc = 0.5 * grid.l2();
  const double width = 0.1 * std::min(grid.l1(), grid.l2());
  return [zc, width](double r, double z) { return std::exp(-(r * r + (z - zc) * (z - zc)) / (width * width)); };
}

std::vector<double> sample_unknowns(const Grid2D& grid, const Field& f) {
  std::vector<double> v(grid.unknowns());
  for (std::size_t k = 1; k <= grid.n2(); ++k) {
    for (std::size_t i = 1; i < grid.n1(); ++i) v[grid.index(i, k)] = f(grid.r(i), grid.z(k));
  }
  return v;
}

double norm2(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

void write_solution(const fs::path& dir, const Grid2D& grid, std::span<const double> x) {
  write_grid_text(dir / "solution.txt", nodes_from_unknowns(grid, x));
}

SolverKind solver_kind(const RunConfig& c) { return c.solver.method == "pcg" ? SolverKind::Pcg : SolverKind::Chebyshev; }
BoundsMode bounds_mode(const RunConfig& c) {
  return c.solver.bounds == "lanczos" ? BoundsMode::Lanczos : BoundsMode::Analytic;
}

double manual_vtilde(const RunConfig& c) {
  if (c.precond.vtilde_mode == "auto") return 0.0;
  if (!(c.precond.vtilde > 0.0)) throw Error(Errc::Config, "precond.vtilde must be positive in manual mode");
  return c.precond.vtilde;
}

std::vector<Receiver> parse_receivers(const std::vector<std::string>& items) {
  std::vector<Receiver> out;
  for (const auto& item : items) {
    const auto colon = item.find(':');
    Receiver rec;
    std::istringstream rs(item.substr(0, colon));
    std::istringstream zs(colon == std::string::npos ? "" : item.substr(colon + 1));
    std::string rest;
    if (colon == std::string::npos || !(rs >> rec.r) || !(zs >> rec.z) || rs >> rest || zs >> rest || rec.r < 0.0 ||
        rec.z < 0.0) {
      throw Error(Errc::Config, "receiver '" + item + "' is not r:z with r, z >= 0");
    }
    out.push_back(rec);
  }
  if (out.empty()) throw Error(Errc::Config, "receivers.positions is empty");
  return out;
}

void check_inside(const Grid2D& grid, double r, double z, const std::string& what) {
  if (r > grid.l1() || z > grid.l2()) {
    throw Error(Errc::Config, what + " (" + exact_num(r) + ", " + exact_num(z) + ") lies outside the domain");
  }
}

}  // namespace

void cmd_poisson(RunConfig& c, std::ostream& log) {
  const fs::path dir = c.output.dir;
  const Grid2D grid = make_grid(c);
  const auto start = Clock::now();
  std::optional<Partition> partition;
  if (c.ranks > 1) partition = Partition::balanced(grid.line(), c.ranks);
  const SovPreconditioner pre(grid, c.poisson.vtilde, c.poisson.shift, partition);

  std::vector<double> exact;
  std::vector<double> phi(grid.unknowns());
  if (c.rhs.kind == "manufactured") {
    exact = sample_unknowns(grid, manufactured_profile(grid));
    pre.apply(exact, phi);
  } else {
    const CoefficientFields fields{constant_field(c.poisson.vtilde), constant_field(c.poisson.shift)};
    phi = assemble(grid, fields, rhs_field(c, grid)).phi;
  }

  std::vector<double> x(grid.unknowns(), 0.0);
  comm::CommStats stats = serial_stats();
  if (c.ranks == 1) {
    pre.apply_inverse(phi, x);
  } else {
    comm::World world(c.ranks);
    world.run(comm::parse_executor(c.executor), [&](comm::Comm& comm) {
      const SlabOperator slab(pre.reference(), *partition, comm.rank());
      std::vector<double> f_local(slab.local_size());
      std::vector<double> y_local(slab.local_size());
      slab.scatter(phi, f_local);
      pre.apply_inverse_on_rank(comm, f_local, y_local);
      slab.gather(y_local, x);
    });
    stats = world.stats();
  }
  const double seconds = seconds_since(start);

  std::vector<double> bx(grid.unknowns());
  pre.apply(x, bx);
  for (std::size_t j = 0; j < bx.size(); ++j) bx[j] -= phi[j];
  const double phi_norm = norm2(phi);
  const double relres = phi_norm > 0.0 ? norm2(bx) / phi_norm : norm2(bx);

  ReportLines report{{"command", "poisson"},
                     {"unknowns", std::to_string(grid.unknowns())},
                     {"vtilde", exact_num(pre.vtilde())},
                     {"shift", exact_num(pre.shift())},
                     {"ranks", std::to_string(c.ranks)},
                     {"relres", num(relres)}};
  if (!exact.empty()) {
    double err = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      err = std::max(err, std::abs(x[j] - exact[j]));
      scale = std::max(scale, std::abs(exact[j]));
    }
    report.emplace_back("max_error", num(err / scale));
  }
  report.emplace_back("seconds", num(c.output.timing ? seconds : 0.0));
  write_solution(dir, grid, x);
  write_report(dir / "report.txt", report);
  write_comm_stats(dir / "comm_stats.csv", stats);
  log << "poisson: " << grid.unknowns() << " unknowns, relres " << num(relres) << '\n';
}

void cmd_elliptic(RunConfig& c, std::ostream& log) {
  const fs::path dir = c.output.dir;
  const Grid2D grid = make_grid(c);
  CoefficientFields fields;
  if (c.coeff.kind == "smooth") {
    if (!(c.coeff.kappa > c.coeff.kappa_amp)) throw Error(Errc::Config, "coeff.kappa must exceed coeff.kappa_amp");
    const double mean = c.coeff.kappa;
    const double amp = c.coeff.kappa_amp;
    const double l1 = grid.l1();
    const double l2 = grid.l2();
    fields.kappa = [=](double r, double z) {
      return mean + amp * std::sin(std::numbers::pi * r / l1) * std::cos(std::numbers::pi * z / l2);
    };
    fields.q = constant_field(c.coeff.q);
  } else if (c.coeff.kind == "constant") {
    fields = {constant_field(c.coeff.kappa), constant_field(c.coeff.q)};
  } else {
    fields.kappa = grid_file_field(c.coeff.kappa_file, grid, "coeff.kappa_file", Sign::Positive);
    fields.q = c.coeff.q_file.empty() ? constant_field(c.coeff.q) : grid_file_field(c.coeff.q_file, grid, "coeff.q_file", Sign::NonNegative);
  }

  std::vector<double> exact;
  DiscreteOperator op = [&] {
    if (c.rhs.kind != "manufactured") return assemble(grid, fields, rhs_field(c, grid));
    ManufacturedProblem mp = manufactured_problem(grid, manufactured_profile(grid), fields);
    exact = std::move(mp.exact);
    return std::move(mp.op);
  }();

  EllipticSolveOptions options;
  options.solver = solver_kind(c);
  options.bounds = bounds_mode(c);
  options.vtilde = manual_vtilde(c);
  options.tol = c.solver.tol;
  options.max_iter = c.solver.max_iter;
  options.check_every = c.solver.check_every;
  options.ranks = c.ranks;
  options.executor = comm::parse_executor(c.executor);
  const auto start = Clock::now();
  const EllipticSolution sol = solve_elliptic(op, options);
  const double seconds = seconds_since(start);
  c.precond.vtilde = sol.vtilde;

  std::vector<double> residual(grid.unknowns());
  apply_spd(op, sol.x, residual);
  for (std::size_t j = 0; j < residual.size(); ++j) residual[j] = op.phi[j] - residual[j];
  const double phi_norm = norm2(op.phi);
  const double check = phi_norm > 0.0 ? norm2(residual) / phi_norm : norm2(residual);

  ReportLines report{{"command", "elliptic"},
                     {"unknowns", std::to_string(grid.unknowns())},
                     {"method", c.solver.method},
                     {"ranks", std::to_string(c.ranks)},
                     {"s1", exact_num(op.bounds.s1)},
                     {"s2", exact_num(op.bounds.s2)},
                     {"d1", exact_num(op.bounds.d1)},
                     {"d2", exact_num(op.bounds.d2)},
                     {"vtilde", exact_num(sol.vtilde)},
                     {"shift", exact_num(sol.shift)},
                     {"iterations", std::to_string(sol.report.iterations)},
                     {"preconditioner_applications", std::to_string(sol.report.preconditioner_applications)},
                     {"operator_applications", std::to_string(sol.report.operator_applications)},
                     {"converged", sol.report.converged ? "true" : "false"},
                     {"relres", num(sol.report.relres)},
                     {"relres_check", num(check)}};
  if (options.solver == SolverKind::Chebyshev) {
    report.emplace_back("gamma1", num(sol.bounds.gamma1));
    report.emplace_back("gamma2", num(sol.bounds.gamma2));
  }
  if (!exact.empty()) {
    std::vector<double> e(exact.size());
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = sol.x[j] - exact[j];
    report.emplace_back("l2_error", num(grid_l2(grid, e)));
    report.emplace_back("l2_relative_error", num(grid_l2(grid, e) / grid_l2(grid, exact)));
  }
  report.emplace_back("seconds", num(c.output.timing ? seconds : 0.0));
  write_solution(dir, grid, sol.x);
  write_iterations(dir / "iterations.csv", sol.report, c.output.timing);
  write_report(dir / "report.txt", report);
  write_comm_stats(dir / "comm_stats.csv", c.ranks > 1 ? sol.comm_stats : serial_stats());
  log << "elliptic: " << sol.report.iterations << " iterations, " << sol.report.preconditioner_applications
      << " preconditioner applications, relres " << num(sol.report.relres) << '\n';
}

void cmd_acoustic(RunConfig& c, std::ostream& log) {
  const fs::path dir = c.output.dir;
  const Grid2D grid = make_grid(c);
  MediumModel model;
  if (c.model.kind == "homogeneous") {
    model.velocity = constant_field(c.model.speed * c.model.speed);
  } else if (c.model.kind == "fault") {
    model.velocity = c.model.fault.coefficient();
  } else {
    const Field speed = grid_file_field(c.model.speed_file, grid, "model.speed_file", Sign::Positive);
    model.velocity = [speed](double r, double z) {
      const double v = speed(r, z);
      return v * v;
    };
  }
  model.density = c.model.kind == "file" && !c.model.density_file.empty()
                      ? grid_file_field(c.model.density_file, grid, "model.density_file", Sign::Positive)
                      : constant_field(c.model.density);

  check_inside(grid, c.source.r, c.source.z, "source");
  const std::vector<Receiver> receivers = parse_receivers(c.receivers);
  for (const auto& rec : receivers) check_inside(grid, rec.r, rec.z, "receiver");
  for (double t : c.output.snapshots) {
    if (t > c.output.t_end) throw Error(Errc::Config, "snapshot time " + exact_num(t) + " exceeds output.t_end");
  }

  const LaguerreParams params{c.laguerre.h, c.laguerre.alpha, c.laguerre.n_terms};
  params.validate();
  const Wavelet wavelet{c.wavelet.f0, c.wavelet.t0, c.wavelet.gamma};
  std::vector<double> coefficients(params.n_terms, 0.0);
  if (c.wavelet.amplitude != 0.0) {
    coefficients = project_source(wavelet, params);
    for (double& f : coefficients) f *= c.wavelet.amplitude;
  }

  AcousticOptions options;
  options.solver = solver_kind(c);
  options.bounds = bounds_mode(c);
  options.shift = c.precond.shift_mode == "acoustic" ? ShiftMode::Acoustic : ShiftMode::Average;
  options.vtilde = manual_vtilde(c);
  options.tol = c.solver.tol;
  options.max_iter = c.solver.max_iter;
  options.check_every = c.solver.check_every;
  options.ranks = c.ranks;
  options.executor = comm::parse_executor(c.executor);
  options.source_r = c.source.r;
  options.source_z = c.source.z;

  const auto start = Clock::now();
  const LaguerreSeries series = solve_all_harmonics(grid, model, params, std::move(coefficients), options);
  const double solve_seconds = seconds_since(start);
  c.precond.vtilde = series.vtilde;

  const auto steps = static_cast<std::size_t>(std::floor(c.output.t_end / c.output.dt + 1e-9));
  std::vector<double> times(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) times[j] = static_cast<double>(j) * c.output.dt;
  const Seismogram seismogram = reconstruct(series, times, receivers);
  {
    const fs::path path = dir / "seismogram.csv";
    auto out = open_output(path);
    seismogram.write_csv(out);
    finish(out, path);
  }
  {
    const fs::path path = dir / "receivers.csv";
    auto out = open_output(path);
    out << "index,r,z,node_r,node_z\n";
    for (std::size_t j = 0; j < receivers.size(); ++j) {
      const std::size_t idx = nearest_unknown(grid, receivers[j].r, receivers[j].z);
      const std::size_t i = idx % grid.line() + 1;
      const std::size_t k = idx / grid.line() + 1;
      out << j + 1 << ',' << exact_num(receivers[j].r) << ',' << exact_num(receivers[j].z) << ','
          << exact_num(grid.r(i)) << ',' << exact_num(grid.z(k)) << '\n';
    }
    finish(out, path);
  }
  {
    const fs::path path = dir / "harmonics.csv";
    auto out = open_output(path);
    out << "m,source_coefficient,iterations,norm\n";
    const auto norms = series.harmonic_norms();
    for (std::size_t m = 0; m < params.n_terms; ++m) {
      out << m << ',' << num(series.source_coefficients[m]) << ',' << series.iterations[m] << ',' << num(norms[m])
          << '\n';
    }
    finish(out, path);
  }
  for (std::size_t s = 0; s < c.output.snapshots.size(); ++s) {
    const double t = c.output.snapshots[s];
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.f32", s);
    write_grid_raw(dir / name, nodes_from_unknowns(grid, reconstruct_field(series, t)),
                   {{"quantity", "u"}, {"t", exact_num(t)}});
  }

  std::size_t total_iterations = 0;
  std::size_t max_iterations = 0;
  for (std::size_t it : series.iterations) {
    total_iterations += it;
    max_iterations = std::max(max_iterations, it);
  }
  const SourceNode src = source_node(grid, c.source.r, c.source.z);
  ReportLines report{{"command", "acoustic"},
                     {"unknowns", std::to_string(grid.unknowns())},
                     {"harmonics", std::to_string(params.n_terms)},
                     {"method", c.solver.method},
                     {"ranks", std::to_string(c.ranks)},
                     {"vtilde", exact_num(series.vtilde)},
                     {"shift", exact_num(series.shift)},
                     {"source_node_r", exact_num(grid.r(src.i))},
                     {"source_node_z", exact_num(grid.z(src.k))},
                     {"total_iterations", std::to_string(total_iterations)},
                     {"max_iterations", std::to_string(max_iterations)},
                     {"preconditioner_applications", std::to_string(series.preconditioner_applications)},
                     {"tail_energy", num(series.tail_energy())}};
  if (options.solver == SolverKind::Chebyshev) {
    report.emplace_back("gamma1", num(series.bounds.gamma1));
    report.emplace_back("gamma2", num(series.bounds.gamma2));
  }
  report.emplace_back("seconds", num(c.output.timing ? solve_seconds : 0.0));
  write_report(dir / "report.txt", report);
  write_comm_stats(dir / "comm_stats.csv", c.ranks > 1 ? series.comm_stats : serial_stats());
  log << "acoustic: " << params.n_terms << " harmonics, M_delta " << series.preconditioner_applications
      << ", tail energy " << num(series.tail_energy()) << '\n';
}

void cmd_bench(RunConfig& c, std::ostream& log) {
  const fs::path dir = c.output.dir;
  const comm::ExecutorKind kind = comm::parse_executor(c.executor);
  const bool timed = kind == comm::ExecutorKind::Threads && c.output.timing;
  const std::size_t n = c.bench.n;
  const std::size_t batch = c.bench.batch;
  if (c.bench.ranks.empty()) throw Error(Errc::Config, "bench.ranks is empty");

  std::mt19937_64 rng(c.bench.seed);
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  std::uniform_real_distribution<double> margin(0.5, 1.5);
  std::vector<double> lower(n - 1);
  std::vector<double> diag(n);
  std::vector<double> upper(n - 1);
  for (double& v : lower) v = off(rng);
  for (double& v : upper) v = off(rng);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = (i > 0 ? std::abs(lower[i - 1]) : 0.0) + (i + 1 < n ? std::abs(upper[i]) : 0.0) + margin(rng);
  }
  const TridiagonalMatrix matrix(lower, diag, upper);

  const fs::path path = dir / "bench.csv";
  auto out = open_output(path);
  out << "executor,p,n,batch,seconds,speedup,msgs,scalars,levels,tree_levels,predicted_dichotomy,predicted_cyclic,"
         "residual\n";
  std::optional<double> base_seconds;
  for (int p : c.bench.ranks) {
    const Partition partition = Partition::balanced(n, p);
    const DichotomyPlan plan = build_plan(matrix, partition);

    // Right-hand sides drawn in global order (system j, row i), stored per rank.
    std::vector<std::vector<double>> rhs(static_cast<std::size_t>(p));
    std::vector<std::vector<double>> x(static_cast<std::size_t>(p));
    for (int r = 1; r <= p; ++r) {
      rhs[r - 1].resize(partition.size(r) * batch);
      x[r - 1].resize(partition.size(r) * batch);
    }
    std::mt19937_64 rhs_rng(c.bench.seed + 1);
    for (std::size_t j = 0; j < batch; ++j) {
      for (int r = 1; r <= p; ++r) {
        const std::size_t len = partition.size(r);
        for (std::size_t i = 0; i < len; ++i) rhs[r - 1][j * len + i] = off(rhs_rng);
      }
    }

    double best = 0.0;
    comm::CommStats stats;
    for (std::size_t rep = 0; rep < c.bench.repeats; ++rep) {
      comm::World world(p);
      const auto start = Clock::now();
      world.run(kind, [&](comm::Comm& comm) {
        const std::size_t r = static_cast<std::size_t>(comm.rank() - 1);
        const LocalSystem sys{&plan, rhs[r], x[r], batch};
        solve_on_rank(comm, std::span(&sys, 1));
      });
      const double elapsed = seconds_since(start);
      best = rep == 0 ? elapsed : std::min(best, elapsed);
      stats = world.stats();
    }

    // Residual of the first system, relative to its right-hand side.
    std::vector<double> x0(n);
    std::vector<double> b0(n);
    for (int r = 1; r <= p; ++r) {
      const std::size_t len = partition.size(r);
      std::copy_n(x[r - 1].begin(), len, x0.begin() + static_cast<std::ptrdiff_t>(partition.first(r) - 1));
      std::copy_n(rhs[r - 1].begin(), len, b0.begin() + static_cast<std::ptrdiff_t>(partition.first(r) - 1));
    }
    const std::vector<double> ax = matrix.apply(x0);
    double res = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      res = std::max(res, std::abs(ax[i] - b0[i]));
      scale = std::max(scale, std::abs(b0[i]));
    }
    const double residual = res / scale;
    if (!(residual <= 1e-8)) {
      throw Error(Errc::Breakdown, "bench solve with p = " + std::to_string(p) + " left residual " + num(residual));
    }

    const comm::RankStats total = stats.total();
    out << comm::to_string(kind) << ',' << p << ',' << n << ',' << batch << ',';
    if (timed) {
      if (!base_seconds) base_seconds = best;
      out << num(best) << ',' << num(*base_seconds / best);
    } else {
      out << ',';
    }
    out << ',' << total.msgs_sent << ',' << total.scalars_sent << ',' << total.levels << ',' << total.tree_levels << ',';
    const auto l = static_cast<double>(batch);
    if (p >= 2) {
      out << num(predict_time_dichotomy(p, l, c.bench.latency, c.bench.per_scalar, c.bench.per_add)) << ','
          << num(predict_time_cyclic(p, l, c.bench.latency, c.bench.per_scalar, c.bench.per_add));
    } else {
      out << ',';
    }
    out << ',' << num(residual) << '\n';
    log << "bench: p = " << p << ", levels " << total.levels << ", scalars " << total.scalars_sent;
    if (timed) log << ", " << num(best) << " s";
    log << '\n';
  }
  finish(out, path);
}

}  // namespace axisolve::cli
