#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "axisolve/model_io.hpp"

namespace axisolve::cli {

struct GridConfig {
  std::size_t n1 = 128;
  std::size_t n2 = 128;
  double l1 = 0.0;  // 0 selects the command default: 1 for poisson/elliptic, 1000 for acoustic
  double l2 = 0.0;
};

struct SolverConfig {
  std::string method = "pcg";  // pcg | chebyshev
  double tol = 1e-10;
  std::size_t max_iter = 1000;
  std::size_t check_every = 8;
  std::string bounds = "lanczos";  // lanczos | analytic
};

struct PrecondConfig {
  std::string vtilde_mode = "auto";  // auto | manual
  double vtilde = 0.0;
  std::string shift_mode = "acoustic";  // acoustic | average; acoustic applies to the acoustic command only
};

struct OutputConfig {
  std::string dir = "out";
  bool timing = true;  // false writes 0 in every wall-time field
  double t_end = 0.5;
  double dt = 0.002;
  std::vector<double> snapshots;
};

struct PoissonConfig {
  double vtilde = 1.0;
  double shift = 0.0;
};

struct CoeffConfig {
  std::string kind = "smooth";  // smooth | constant | file
  double kappa = 1.5;
  double kappa_amp = 0.5;
  double q = 0.0;
  std::string kappa_file;
  std::string q_file;
};

struct RhsConfig {
  std::string kind = "manufactured";  // manufactured | gaussian | zero | file
  std::string file;
};

struct ModelConfig {
  std::string kind = "fault";  // homogeneous | fault | file
  double speed = 2000.0;
  double density = 1.0;
  std::string speed_file;
  std::string density_file;
  FaultModel fault;
};

struct LaguerreConfig {
  double h = 300.0;
  int alpha = 5;
  std::size_t n_terms = 2000;
};

struct WaveletConfig {
  double f0 = 30.0;
  double t0 = 0.2;
  double gamma = 4.0;
  double amplitude = 1.0;
};

struct SourceConfig {
  double r = 0.0;
  double z = 200.0;
};

struct BenchConfig {
  std::vector<int> ranks{1, 2, 4, 8};
  std::size_t n = 65536;
  std::size_t batch = 32;
  std::size_t repeats = 3;
  std::uint64_t seed = 1;
  double latency = 1.0;
  double per_scalar = 1.0;
  double per_add = 1.0;
};

struct RunConfig {
  std::string command;
  int ranks = 1;
  std::string executor = "sim";  // sim | threads
  GridConfig grid;
  SolverConfig solver;
  PrecondConfig precond;
  OutputConfig output;
  PoissonConfig poisson;
  CoeffConfig coeff;
  RhsConfig rhs;
  ModelConfig model;
  LaguerreConfig laguerre;
  WaveletConfig wavelet;
  SourceConfig source;
  std::vector<std::string> receivers{"0:200", "0:100", "300:200", "500:200"};
  BenchConfig bench;
};

/// One configurable value: its section, key, and a printer of the current value.
struct ConfigEntry {
  std::string section;
  std::string key;
  std::function<std::string()> print;
};

/// Writes the entries as `key = value` lines grouped under `[section]` headers.
void write_effective_config(std::ostream& out, const std::string& command, const std::vector<ConfigEntry>& entries);

/// Exit codes: 0 ok, 2 configuration, 3 solver, 4 I/O.
[[nodiscard]] int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Command bodies. They read a validated config whose command defaults are resolved.
void cmd_poisson(RunConfig& config, std::ostream& log);
void cmd_elliptic(RunConfig& config, std::ostream& log);
void cmd_acoustic(RunConfig& config, std::ostream& log);
void cmd_bench(RunConfig& config, std::ostream& log);

}  // namespace axisolve::cli
