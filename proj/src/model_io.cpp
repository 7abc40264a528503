#include "axisolve/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "axisolve/error.hpp"

namespace axisolve {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_shape(const NodalGrid& g, const std::string& where) {
  if (g.n1 < 2 || g.n2 < 2 || !(g.l1 > 0.0) || !(g.l2 > 0.0)) {
    throw Error(Errc::Io, where + ": bad header (need n1, n2 >= 2 and l1, l2 > 0)");
  }
}

std::map<std::string, std::string> read_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open sidecar " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

template <class T>
T sidecar_value(const std::map<std::string, std::string>& kv, const std::string& key, const std::filesystem::path& path) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw Error(Errc::Io, path.string() + ": missing key " + key);
  std::istringstream in(it->second);
  T v{};
  if (!(in >> v)) throw Error(Errc::Io, path.string() + ": bad value for " + key);
  return v;
}

}  // namespace

void NodalGrid::check_matches(const Grid2D& grid, const std::string& what) const {
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); };
  if (n1 != grid.n1() || n2 != grid.n2() || !close(l1, grid.l1()) || !close(l2, grid.l2())) {
    throw Error(Errc::Config, what + " is " + std::to_string(n1) + "x" + std::to_string(n2) + " on " + fmt(l1) + "x" +
                                  fmt(l2) + " but the grid is " + std::to_string(grid.n1()) + "x" +
                                  std::to_string(grid.n2()) + " on " + fmt(grid.l1()) + "x" + fmt(grid.l2()));
  }
}

NodalGrid read_grid_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  NodalGrid g;
  if (!(in >> g.n1 >> g.n2 >> g.l1 >> g.l2)) throw Error(Errc::Io, path.string() + ": unreadable header");
  check_shape(g, path.string());
  g.values.resize(g.n1 * g.n2);
  for (std::size_t j = 0; j < g.values.size(); ++j) {
    if (!(in >> g.values[j])) {
      throw Error(Errc::Io, path.string() + ": expected " + std::to_string(g.values.size()) + " values, read " +
                                std::to_string(j));
    }
  }
  std::string extra;
  if (in >> extra) throw Error(Errc::Io, path.string() + ": trailing data after " + std::to_string(g.values.size()) + " values");
  return g;
}

void write_grid_text(const std::filesystem::path& path, const NodalGrid& g) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << g.n1 << ' ' << g.n2 << ' ' << fmt(g.l1) << ' ' << fmt(g.l2) << '\n';
  for (std::size_t k = 0; k < g.n2; ++k) {
    for (std::size_t i = 0; i < g.n1; ++i) out << (i ? " " : "") << fmt(g.values[k * g.n1 + i]);
    out << '\n';
  }
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

std::filesystem::path sidecar_path(const std::filesystem::path& raw_path) {
  auto p = raw_path;
  p.replace_extension(".hdr");
  return p;
}

NodalGrid read_grid_raw(const std::filesystem::path& path) {
  const auto hdr = sidecar_path(path);
  const auto kv = read_sidecar(hdr);
  if (sidecar_value<std::string>(kv, "format", hdr) != "float32-le") throw Error(Errc::Io, hdr.string() + ": format must be float32-le");
  NodalGrid g;
  g.n1 = sidecar_value<std::size_t>(kv, "n1", hdr);
  g.n2 = sidecar_value<std::size_t>(kv, "n2", hdr);
  g.l1 = sidecar_value<double>(kv, "l1", hdr);
  g.l2 = sidecar_value<double>(kv, "l2", hdr);
  check_shape(g, hdr.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  const std::size_t count = g.n1 * g.n2;
  std::vector<unsigned char> bytes(4 * count);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()) || in.peek() != std::char_traits<char>::eof()) {
    throw Error(Errc::Io, path.string() + ": expected exactly " + std::to_string(bytes.size()) + " bytes");
  }
  g.values.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::uint32_t bits = std::uint32_t{bytes[4 * j]} | std::uint32_t{bytes[4 * j + 1]} << 8 |
                               std::uint32_t{bytes[4 * j + 2]} << 16 | std::uint32_t{bytes[4 * j + 3]} << 24;
    g.values[j] = std::bit_cast<float>(bits);
  }
  return g;
}

void write_grid_raw(const std::filesystem::path& path, const NodalGrid& g, const SidecarEntries& extra) {
  std::vector<unsigned char> bytes(4 * g.values.size());
  for (std::size_t j = 0; j < g.values.size(); ++j) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(g.values[j]));
    for (int b = 0; b < 4; ++b) bytes[4 * j + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  std::ofstream hdr(sidecar_path(path));
  if (!hdr) throw Error(Errc::Io, "cannot write " + sidecar_path(path).string());
  hdr << "format = float32-le\norder = k-outer\nn1 = " << g.n1 << "\nn2 = " << g.n2 << "\nl1 = " << fmt(g.l1)
      << "\nl2 = " << fmt(g.l2) << '\n';
  for (const auto& [k, v] : extra) hdr << k << " = " << v << '\n';
  if (!out || !hdr) throw Error(Errc::Io, "write failed: " + path.string());
}

NodalGrid read_grid(const std::filesystem::path& path) {
  return path.extension() == ".f32" ? read_grid_raw(path) : read_grid_text(path);
}

Field bilinear_field(NodalGrid grid) {
  return [g = std::move(grid)](double r, double z) {
    const double h1 = g.l1 / (static_cast<double>(g.n1) - 0.5);
    const double h2 = g.l2 / (static_cast<double>(g.n2) - 0.5);
    auto locate = [](double x, double h, std::size_t n, std::size_t& lo, double& frac) {
      double s = std::clamp(x / h - 0.5, 0.0, static_cast<double>(n - 1));  // 0-based node coordinate
      if (std::abs(s - std::round(s)) < 1e-9) s = std::round(s);  // land on nodes exactly
      lo = std::min(static_cast<std::size_t>(s), n - 2);
      frac = s - static_cast<double>(lo);
    };
    std::size_t i = 0;
    std::size_t k = 0;
    double fr = 0.0;
    double fz = 0.0;
    locate(r, h1, g.n1, i, fr);
    locate(z, h2, g.n2, k, fz);
    const double* row0 = &g.values[k * g.n1];
    const double* row1 = row0 + g.n1;
    return (1.0 - fz) * ((1.0 - fr) * row0[i] + fr * row0[i + 1]) + fz * ((1.0 - fr) * row1[i] + fr * row1[i + 1]);
  };
}

NodalGrid sample_nodes(const Grid2D& grid, const Field& field) {
  NodalGrid g{grid.n1(), grid.n2(), grid.l1(), grid.l2(), {}};
  g.values.reserve(grid.n1() * grid.n2());
  for (std::size_t k = 1; k <= grid.n2(); ++k) {
    for (std::size_t i = 1; i <= grid.n1(); ++i) g.values.push_back(field(grid.r(i), grid.z(k)));
  }
  return g;
}

NodalGrid nodes_from_unknowns(const Grid2D& grid, std::span<const double> y) {
  if (y.size() != grid.unknowns()) throw Error(Errc::DimensionMismatch, "field does not match the grid");
  NodalGrid g{grid.n1(), grid.n2(), grid.l1(), grid.l2(), std::vector<double>(grid.n1() * grid.n2(), 0.0)};
  for (std::size_t k = 1; k <= grid.n2(); ++k) {
    for (std::size_t i = 1; i < grid.n1(); ++i) g.values[(k - 1) * grid.n1() + (i - 1)] = y[grid.index(i, k)];
  }
  return g;
}

double FaultModel::speed(double r, double z) const {
  const double cot = std::cos(dip_degrees * std::numbers::pi / 180.0) / std::sin(dip_degrees * std::numbers::pi / 180.0);
  const double plane_r = fault_r + (z - interface_z) * cot;
  const double depth = r > plane_r ? interface_z + fault_throw : interface_z;
  return z < depth ? v_top : v_bottom;
}

Field FaultModel::coefficient() const {
  if (!(v_top > 0.0) || !(v_bottom > 0.0)) throw Error(Errc::Config, "fault model speeds must be positive");
  if (!(dip_degrees > 0.0 && dip_degrees <= 90.0)) throw Error(Errc::Config, "fault dip must lie in (0, 90] degrees");
  return [m = *this](double r, double z) {
    const double v = m.speed(r, z);
    return v * v;
  };
}

}  // namespace axisolve
