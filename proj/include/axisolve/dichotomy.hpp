#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "axisolve/comm.hpp"
#include "axisolve/tridiag.hpp"

namespace axisolve {

/// Contiguous block ownership of the unknowns 1..n by ranks 1..p.
class Partition {
 public:
  /// Throws InvalidPartition if the list is empty or any block is shorter than 2.
  explicit Partition(std::vector<std::size_t> sizes);

  /// Near-equal blocks, the first n mod p ranks one longer. Throws InvalidPartition if n < 2p.
  static Partition balanced(std::size_t n, int ranks);

  [[nodiscard]] int ranks() const noexcept { return static_cast<int>(sizes_.size()); }
  [[nodiscard]] std::size_t order() const noexcept { return offsets_.back(); }
  [[nodiscard]] std::span<const std::size_t> sizes() const noexcept { return sizes_; }

  /// Global 1-based index of the first / last unknown owned by `rank` (m_L, m_R).
  [[nodiscard]] std::size_t first(int rank) const { return offsets_[static_cast<std::size_t>(rank - 1)] + 1; }
  [[nodiscard]] std::size_t last(int rank) const { return offsets_[static_cast<std::size_t>(rank)]; }
  [[nodiscard]] std::size_t size(int rank) const { return sizes_[static_cast<std::size_t>(rank - 1)]; }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;  // offsets_[r] = sum of the first r sizes
};

/// One split of the rank interval [lo, hi] at `mid`. lo == hi marks a leaf.
struct SplitNode {
  int lo = 0;
  int hi = 0;
  int mid = 0;

  friend bool operator==(const SplitNode&, const SplitNode&) = default;
};

/// Splitting levels for p ranks. Level 1 is the root [1, p] split at ceil((1 + p) / 2).
/// A node of three or more ranks spawns [lo, mid-1] and [mid+1, hi] on the next level;
/// a two-rank node is finished within its own level; single ranks are leaves.
[[nodiscard]] std::vector<std::vector<SplitNode>> split_levels(int ranks);

/// Everything rank m precomputes. Index conventions are 0-based into the stored vectors.
struct RankPlan {
  std::size_t first = 0;  // m_L
  std::size_t last = 0;   // m_R
  std::vector<double> green_left;   // row m_L of A^-1, length n
  std::vector<double> green_right;  // row m_R of A^-1, length n
  std::vector<double> z_left;       // length m_L, response of x_1..x_{m_L-1} to x_{m_L} = 1; back() == 1
  std::vector<double> z_right;      // length n - m_R + 1, response of x_{m_R+1}..x_n to x_{m_R} = 1; front() == 1

  // Scalars the solve reads, derived from the vectors above.
  double ratio_first = 0.0;  // G^L(m_R) / G^R(m_R)
  double ratio_last = 0.0;   // G^R(m_L) / G^L(m_L)
  double z_left_inner = 0.0;   // Z^L(m_L - 1), 0 for the first rank
  double z_right_inner = 0.0;  // Z^R(m_R + 1), 0 for the last rank

  std::optional<ThomasFactorization> interior;  // {A}_{m_L+1}^{m_R-1}, absent for two-unknown blocks
  double couple_first = 0.0;  // c_{m_L+1}
  double couple_last = 0.0;   // a_{m_R-1}
};

class DichotomyPlan {
 public:
  DichotomyPlan(Partition partition, std::vector<RankPlan> ranks, std::optional<ThomasFactorization> whole);

  [[nodiscard]] const Partition& partition() const noexcept { return partition_; }
  [[nodiscard]] int ranks() const noexcept { return partition_.ranks(); }
  [[nodiscard]] std::size_t order() const noexcept { return partition_.order(); }
  [[nodiscard]] const RankPlan& rank(int r) const { return ranks_[static_cast<std::size_t>(r - 1)]; }
  [[nodiscard]] const std::vector<std::vector<SplitNode>>& levels() const noexcept { return levels_; }
  /// Factorization of the full matrix, kept only when p = 1.
  [[nodiscard]] const std::optional<ThomasFactorization>& whole() const noexcept { return whole_; }

  /// Hash over every stored number; unchanged by solves.
  [[nodiscard]] std::uint64_t checksum() const;

 private:
  Partition partition_;
  std::vector<RankPlan> ranks_;
  std::vector<std::vector<SplitNode>> levels_;
  std::optional<ThomasFactorization> whole_;
};

/// Preparation step: no communication, O(n) work per rank. Throws InvalidPartition if the
/// partition does not cover A, ZeroPivot from the local factorizations and SingularPlan when a
/// diagonal entry of A^-1 used as a divisor is below 1e-280 in magnitude.
[[nodiscard]] DichotomyPlan build_plan(const TridiagonalMatrix& matrix, const Partition& partition);

struct Betas {
  double left = 0.0;
  double right = 0.0;
};

/// Dot products of the owned right-hand-side slice with the owned slices of G^L_m and G^R_m.
[[nodiscard]] Betas local_betas(const DichotomyPlan& plan, int rank, std::span<const double> rhs_local);

enum class TraceRole { LeftGroup, Middle, RightGroup };

struct TraceRow {
  int level = 0;
  int rank = 0;
  TraceRole role = TraceRole::Middle;
  std::uint64_t scalars_sent = 0;
};

/// Point-to-point traffic between groups and middle ranks; reduce traffic is counted in rows.
struct TraceMessage {
  int level = 0;
  int from = 0;
  int to = 0;
  bool is_delta = false;  // chi (group root to middle) otherwise
  std::size_t scalars = 0;
};

struct DichotomyTrace {
  std::vector<TraceRow> rows;
  std::vector<TraceMessage> messages;

  void append(const DichotomyTrace& other);
  /// Orders rows and messages by (level, rank / from, to).
  void sort();
  /// `level,rank,role,scalars_sent`
  void write_csv(std::ostream& out) const;
  /// `level,from,to,kind,scalars`
  void write_messages_csv(std::ostream& out) const;
};

/// One system handled by a rank: `count` right-hand sides of this rank's block, stored one
/// after another, and space for the matching solution slices.
struct LocalSystem {
  const DichotomyPlan* plan = nullptr;
  std::span<const double> rhs;
  std::span<double> solution;
  std::size_t count = 1;
};

/// Message tags used by the dichotomy protocol lie in [kDichotomyTagBase, kDichotomyTagBase + 8 * levels).
inline constexpr int kDichotomyTagBase = 1 << 20;

/// SPMD body: solves all `systems` for the calling rank. Systems must share one partition;
/// their chi/delta traffic travels in the same messages. Every rank must call this with the
/// same number of systems and counts.
void solve_on_rank(comm::Comm& comm, std::span<const LocalSystem> systems, DichotomyTrace* trace = nullptr);

/// Scatter / run / gather convenience over a World. `rhs` holds `count` full vectors
/// back to back; the result has the same layout.
[[nodiscard]] std::vector<double> solve_many(const DichotomyPlan& plan, std::span<const double> rhs, std::size_t count,
                                             comm::World& world,
                                             comm::ExecutorKind kind = comm::ExecutorKind::Simulator,
                                             DichotomyTrace* trace = nullptr);

[[nodiscard]] std::vector<double> dichotomy_solve(const DichotomyPlan& plan, std::span<const double> rhs,
                                                  comm::World& world,
                                                  comm::ExecutorKind kind = comm::ExecutorKind::Simulator,
                                                  DichotomyTrace* trace = nullptr);

/// Communication cost models with latency alpha, per-scalar transfer beta and per-addition
/// gamma for l right-hand sides. DomainError for p < 2 or negative parameters.
[[nodiscard]] double predict_time_dichotomy(double p, double l, double alpha, double beta, double gamma);
[[nodiscard]] double predict_time_cyclic(double p, double l, double alpha, double beta, double gamma);

}  // namespace axisolve
