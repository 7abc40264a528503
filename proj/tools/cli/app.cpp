#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <type_traits>

#include <CLI11.hpp>

#include "axisolve/error.hpp"
#include "run_config.hpp"

namespace axisolve::cli {

namespace {

/// INI reader that maps `[section] key` to the option `--section.key` instead of a subcommand.
class SectionedIni : public CLI::ConfigINI {
 public:
  SectionedIni() { commentChar = '#'; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> flat;
    for (auto& item : CLI::ConfigINI::from_config(input)) {
      if (item.name == "++" || item.name == "--") continue;
      std::string full;
      for (const auto& p : item.parents) full += p + ".";
      item.name = full + item.name;
      item.parents.clear();
      flat.push_back(std::move(item));
    }
    return flat;
  }
};

std::string print_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string print_value(bool v) { return v ? "true" : "false"; }
std::string print_value(const std::string& v) {
  return v.find_first_of(" \t,#;\"") == std::string::npos && !v.empty() ? v : "\"" + v + "\"";
}
template <class T>
  requires std::is_integral_v<T>
std::string print_value(T v) {
  return std::to_string(v);
}
template <class T>
std::string print_value(const std::vector<T>& v) {
  std::string s;
  for (std::size_t j = 0; j < v.size(); ++j) s += (j ? "," : "") + print_value(v[j]);
  return s;
}

template <class T>
constexpr bool is_vector = false;
template <class T>
constexpr bool is_vector<std::vector<T>> = true;

class Binder {
 public:
  Binder(CLI::App& app, std::vector<ConfigEntry>& entries) : app_(app), entries_(entries) {}

  template <class T>
  CLI::Option* bind(const std::string& section, const std::string& key, T& var, const std::string& help,
                    const std::string& alias = "") {
    std::string names = "--" + (section.empty() ? key : section + "." + key);
    if (!alias.empty()) names += ",--" + alias;
    CLI::Option* opt = app_.add_option(names, var, help)->capture_default_str();
    if constexpr (is_vector<T>) opt->delimiter(',');
    entries_.push_back({section, key, [&var] { return print_value(var); }});
    return opt;
  }

 private:
  CLI::App& app_;
  std::vector<ConfigEntry>& entries_;
};

const auto kPositive = CLI::PositiveNumber;
const auto kNonNegative = CLI::NonNegativeNumber;

void register_options(CLI::App& app, RunConfig& c, std::vector<ConfigEntry>& entries) {
  Binder b(app, entries);
  b.bind("", "ranks", c.ranks, "Number of ranks (r-slabs)")->check(CLI::Range(1, 4096));
  b.bind("", "executor", c.executor, "Rank executor")->check(CLI::IsMember({"sim", "threads"}));

  b.bind("grid", "n1", c.grid.n1, "Nodes in r")->check(CLI::Range(std::size_t{3}, std::size_t{1} << 20));
  b.bind("grid", "n2", c.grid.n2, "Nodes in z")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  b.bind("grid", "l1", c.grid.l1, "Extent in r (0: command default)")->check(kNonNegative);
  b.bind("grid", "l2", c.grid.l2, "Extent in z (0: command default)")->check(kNonNegative);

  b.bind("solver", "method", c.solver.method, "Outer iteration")->check(CLI::IsMember({"pcg", "chebyshev"}));
  b.bind("solver", "tol", c.solver.tol, "Relative residual target", "tol")->check(kPositive);
  b.bind("solver", "max_iter", c.solver.max_iter, "Iteration limit per solve")->check(kPositive);
  b.bind("solver", "check_every", c.solver.check_every, "Chebyshev residual check interval")->check(kPositive);
  b.bind("solver", "bounds", c.solver.bounds, "Chebyshev bounds source")->check(CLI::IsMember({"lanczos", "analytic"}));

  b.bind("precond", "vtilde_mode", c.precond.vtilde_mode, "auto: (s1 + s2) / 2")->check(CLI::IsMember({"auto", "manual"}));
  b.bind("precond", "vtilde", c.precond.vtilde, "Preconditioner coefficient (manual mode)")->check(kNonNegative);
  b.bind("precond", "shift_mode", c.precond.shift_mode, "Preconditioner shift")
      ->check(CLI::IsMember({"acoustic", "average"}));

  b.bind("output", "dir", c.output.dir, "Output directory", "out");
  b.bind("output", "timing", c.output.timing, "Record wall times");
  b.bind("output", "t_end", c.output.t_end, "Seismogram end time (s)")->check(kPositive);
  b.bind("output", "dt", c.output.dt, "Seismogram sampling step (s)")->check(kPositive);
  b.bind("output", "snapshots", c.output.snapshots, "Snapshot times (s)")->check(kNonNegative);

  b.bind("poisson", "vtilde", c.poisson.vtilde, "Constant coefficient")->check(kPositive);
  b.bind("poisson", "shift", c.poisson.shift, "Constant shift")->check(kNonNegative);

  b.bind("coeff", "kind", c.coeff.kind, "Coefficient fields")->check(CLI::IsMember({"smooth", "constant", "file"}));
  b.bind("coeff", "kappa", c.coeff.kappa, "kappa (mean for smooth)")->check(kPositive);
  b.bind("coeff", "kappa_amp", c.coeff.kappa_amp, "Amplitude of the smooth variation")->check(kNonNegative);
  b.bind("coeff", "q", c.coeff.q, "q")->check(kNonNegative);
  b.bind("coeff", "kappa_file", c.coeff.kappa_file, "Nodal kappa grid");
  b.bind("coeff", "q_file", c.coeff.q_file, "Nodal q grid (empty: constant q)");

  b.bind("rhs", "kind", c.rhs.kind, "Right-hand side")
      ->check(CLI::IsMember({"manufactured", "gaussian", "zero", "file"}));
  b.bind("rhs", "file", c.rhs.file, "Nodal right-hand side grid");

  b.bind("model", "kind", c.model.kind, "Medium")->check(CLI::IsMember({"homogeneous", "fault", "file"}));
  b.bind("model", "speed", c.model.speed, "Homogeneous speed (m/s)")->check(kPositive);
  b.bind("model", "density", c.model.density, "Density (homogeneous and fault)")->check(kPositive);
  b.bind("model", "speed_file", c.model.speed_file, "Nodal speed grid (m/s)");
  b.bind("model", "density_file", c.model.density_file, "Nodal density grid (empty: constant density)");
  b.bind("model", "fault.v_top", c.model.fault.v_top, "Upper layer speed")->check(kPositive);
  b.bind("model", "fault.v_bottom", c.model.fault.v_bottom, "Lower layer speed")->check(kPositive);
  b.bind("model", "fault.interface_z", c.model.fault.interface_z, "Interface depth left of the fault");
  b.bind("model", "fault.throw", c.model.fault.fault_throw, "Interface drop across the fault");
  b.bind("model", "fault.r", c.model.fault.fault_r, "Fault position at the interface depth");
  b.bind("model", "fault.dip", c.model.fault.dip_degrees, "Dip from horizontal (degrees)")
      ->check(CLI::Range(0.0, 90.0));

  b.bind("laguerre", "h", c.laguerre.h, "Transform scale (1/s)")->check(kPositive);
  b.bind("laguerre", "alpha", c.laguerre.alpha, "Laguerre order")->check(CLI::Range(2, 64));
  b.bind("laguerre", "n_terms", c.laguerre.n_terms, "Number of harmonics")->check(kPositive);

  b.bind("wavelet", "f0", c.wavelet.f0, "Dominant frequency (Hz)")->check(kPositive);
  b.bind("wavelet", "t0", c.wavelet.t0, "Delay (s)")->check(kNonNegative);
  b.bind("wavelet", "gamma", c.wavelet.gamma, "Envelope width")->check(kPositive);
  b.bind("wavelet", "amplitude", c.wavelet.amplitude, "Source amplitude");

  b.bind("source", "r", c.source.r, "Source r (m)")->check(kNonNegative);
  b.bind("source", "z", c.source.z, "Source z (m)")->check(kNonNegative);
  b.bind("receivers", "positions", c.receivers, "Receivers as r:z pairs");

  b.bind("bench", "ranks", c.bench.ranks, "Rank counts")->check(CLI::Range(1, 4096));
  b.bind("bench", "n", c.bench.n, "System order")->check(kPositive);
  b.bind("bench", "batch", c.bench.batch, "Right-hand sides per solve")->check(kPositive);
  b.bind("bench", "repeats", c.bench.repeats, "Timed repetitions (minimum kept)")->check(kPositive);
  b.bind("bench", "seed", c.bench.seed, "Matrix and right-hand side seed");
  b.bind("bench", "latency", c.bench.latency, "Cost model alpha")->check(kNonNegative);
  b.bind("bench", "per_scalar", c.bench.per_scalar, "Cost model beta")->check(kNonNegative);
  b.bind("bench", "per_add", c.bench.per_add, "Cost model gamma")->check(kNonNegative);
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::Config:
    case Errc::DomainError:
    case Errc::NonPositiveCoefficient:
    case Errc::DimensionMismatch:
    case Errc::InvalidPartition:
    case Errc::BoundaryViolation:
      return 2;
    case Errc::Io:
      return 4;
    default:
      return 3;
  }
}

void resolve_grid(RunConfig& c) {
  const double extent = c.command == "acoustic" ? 1000.0 : 1.0;
  if (c.grid.l1 == 0.0) c.grid.l1 = extent;
  if (c.grid.l2 == 0.0) c.grid.l2 = extent;
}

}  // namespace

void write_effective_config(std::ostream& out, const std::string& command, const std::vector<ConfigEntry>& entries) {
  out << "# axisolve " << command << " --config <this file>\n";
  std::map<std::string, std::vector<const ConfigEntry*>> sections;
  std::vector<std::string> order;
  for (const auto& e : entries) {
    if (!sections.contains(e.section)) order.push_back(e.section);
    sections[e.section].push_back(&e);
  }
  for (const auto& s : order) {
    if (!s.empty()) out << "\n[" << s << "]\n";
    for (const ConfigEntry* e : sections[s]) {
      const std::string v = e->print();
      if (v.empty()) {
        out << "# " << e->key << " =\n";
      } else {
        out << e->key << " = " << v << '\n';
      }
    }
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  std::vector<ConfigEntry> entries;
  CLI::App app{"Axisymmetric elliptic and acoustic solvers", "axisolve"};
  app.config_formatter(std::make_shared<SectionedIni>());
  app.set_config("--config", "", "Configuration file (INI with sections)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);
  register_options(app, config, entries);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"poisson", "Invert the constant-coefficient separable operator"},
      {"elliptic", "Preconditioned solve of the variable-coefficient problem"},
      {"acoustic", "Laguerre-transform acoustic simulation"},
      {"bench", "Dichotomy batches across rank counts"}};
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->fallthrough()->callback([&config, name] { config.command = name; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::FileError& e) {
    err << "axisolve: Io: " << e.what() << '\n';
    return 4;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  resolve_grid(config);
  const std::filesystem::path dir = config.output.dir;
  int code = 0;
  try {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());
    if (config.command == "poisson") {
      cmd_poisson(config, out);
    } else if (config.command == "elliptic") {
      cmd_elliptic(config, out);
    } else if (config.command == "acoustic") {
      cmd_acoustic(config, out);
    } else {
      cmd_bench(config, out);
    }
  } catch (const Error& e) {
    err << "axisolve " << config.command << ": " << e.what() << '\n';
    code = exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "axisolve " << config.command << ": Io: " << e.what() << '\n';
    code = 4;
  } catch (const std::bad_alloc&) {
    err << "axisolve " << config.command << ": out of memory\n";
    code = 3;
  }
  if (code != 4) {
    std::ofstream echo(dir / "effective.ini");
    write_effective_config(echo, config.command, entries);
    if (!echo) {
      err << "axisolve " << config.command << ": Io: cannot write " << (dir / "effective.ini").string() << '\n';
      code = 4;
    }
  }
  return code;
}

}  // namespace axisolve::cli
