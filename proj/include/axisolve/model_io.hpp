#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "axisolve/elliptic.hpp"

namespace axisolve {

/// Values on all grid nodes (r_i, z_k), i = 1..n1, k = 1..n2, with r_i = (i - 1/2) l1 / (n1 - 1/2)
/// and likewise in z. Storage is k-outer: values[(k-1) n1 + (i-1)].
struct NodalGrid {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double l1 = 0.0;
  double l2 = 0.0;
  std::vector<double> values;

  [[nodiscard]] double at(std::size_t i, std::size_t k) const { return values[(k - 1) * n1 + (i - 1)]; }
  /// Config error unless the dimensions and extents equal the grid's.
  void check_matches(const Grid2D& grid, const std::string& what) const;
};

using SidecarEntries = std::vector<std::pair<std::string, std::string>>;

/// Text format: first line `n1 n2 l1 l2`, then n1*n2 reals, k outer. Io on unreadable or short files.
[[nodiscard]] NodalGrid read_grid_text(const std::filesystem::path& path);
void write_grid_text(const std::filesystem::path& path, const NodalGrid& grid);

/// Raw format: n1*n2 little-endian IEEE float32, k outer, and a sidecar `<stem>.hdr` of
/// `key = value` lines holding at least format, n1, n2, l1, l2. `extra` is appended to the sidecar.
[[nodiscard]] NodalGrid read_grid_raw(const std::filesystem::path& path);
void write_grid_raw(const std::filesystem::path& path, const NodalGrid& grid, const SidecarEntries& extra = {});
[[nodiscard]] std::filesystem::path sidecar_path(const std::filesystem::path& raw_path);

/// Raw when the extension is .f32, text otherwise.
[[nodiscard]] NodalGrid read_grid(const std::filesystem::path& path);

/// Bilinear interpolation between nodes, constant beyond the outermost nodes.
[[nodiscard]] Field bilinear_field(NodalGrid grid);

[[nodiscard]] NodalGrid sample_nodes(const Grid2D& grid, const Field& field);
/// Unknowns plus the zero Dirichlet column i = n1.
[[nodiscard]] NodalGrid nodes_from_unknowns(const Grid2D& grid, std::span<const double> y);

/// Two layers separated by an interface at depth `interface_z`; across the fault the interface
/// drops by `fault_throw`. The fault plane passes through (fault_r, interface_z) and dips at
/// `dip_degrees` from horizontal toward larger r. Speeds are in m/s.
struct FaultModel {
  double v_top = 2000.0;
  double v_bottom = 3000.0;
  double interface_z = 400.0;
  double fault_throw = 100.0;
  double fault_r = 300.0;
  double dip_degrees = 90.0;

  /// Layer speed at (r, z).
  [[nodiscard]] double speed(double r, double z) const;
  /// V_s = speed^2, the coefficient the acoustic operator takes for unit density.
  [[nodiscard]] Field coefficient() const;
};

}  // namespace axisolve
