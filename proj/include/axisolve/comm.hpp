#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace axisolve::comm {

/// Ordered subset of ranks (1-based, strictly increasing) with a designated root.
struct Group {
  std::vector<int> members;
  int root = 0;

  /// Ranks lo..hi inclusive.
  static Group range(int lo, int hi, int root);
  [[nodiscard]] bool contains(int rank) const noexcept;
};

/// Per-rank communication counters. Monotone within a World.
struct RankStats {
  std::uint64_t msgs_sent = 0;
  std::uint64_t scalars_sent = 0;
  std::uint64_t reduces = 0;
  std::uint64_t levels = 0;       // algorithm levels entered via Comm::enter_level
  std::uint64_t tree_levels = 0;  // reduce-tree depth traversed, ceil(log2 |group|) per reduce
  std::uint64_t allreduces = 0;   // allreduce_sum calls; each also counts one reduce

  friend bool operator==(const RankStats&, const RankStats&) = default;
};

struct CommStats {
  std::vector<RankStats> ranks;  // ranks[r - 1]

  /// Sums of the counters; levels and tree_levels are maxima over ranks.
  [[nodiscard]] RankStats total() const;
  /// Header `rank,msgs_sent,scalars_sent,reduces,levels`, one row per rank.
  void write_csv(std::ostream& out) const;

  friend bool operator==(const CommStats&, const CommStats&) = default;
};

/// Counter difference `after - before`, rank by rank.
[[nodiscard]] CommStats operator-(const CommStats& after, const CommStats& before);

enum class ExecutorKind { Simulator, Threads };

[[nodiscard]] ExecutorKind parse_executor(std::string_view name);
[[nodiscard]] std::string_view to_string(ExecutorKind kind) noexcept;

class Transport;

/// Endpoint handed to per-rank (SPMD) code. Only the owning rank may use it.
class Comm {
 public:
  Comm(Transport& transport, RankStats& stats, int rank, int size) noexcept
      : transport_(&transport), stats_(&stats), rank_(rank), size_(size) {}

  [[nodiscard]] int rank() const noexcept { return rank_; }
  [[nodiscard]] int size() const noexcept { return size_; }
  [[nodiscard]] const RankStats& stats() const noexcept { return *stats_; }

  /// FIFO per (from, to, tag) channel.
  void send(int to, int tag, std::span<const double> payload);
  [[nodiscard]] std::vector<double> recv(int from, int tag);

  /// Elementwise sum over the group's members, delivered to the root.
  ///
  /// The summation tree splits the rank-sorted member list in halves (first half
  /// takes the ceiling) down to single members; the half that contains the current
  /// owner keeps it and the other half is owned by its member adjacent to the cut.
  /// Partial sums are always combined as left + right, so the floating-point result
  /// depends only on the member list and root, never on the executor.
  [[nodiscard]] std::optional<std::vector<double>> reduce_sum_to_root(const Group& group,
                                                                      std::span<const double> contribution,
                                                                      int tag);

  /// Root's payload delivered to every member along the same tree, top-down.
  [[nodiscard]] std::vector<double> broadcast(const Group& group, std::span<const double> payload, int tag);

  /// Reduce to rank 1 over all ranks, then broadcast.
  [[nodiscard]] std::vector<double> allreduce_sum(std::span<const double> contribution, int tag);
  [[nodiscard]] double allreduce_sum(double contribution, int tag);

  void enter_level() noexcept { ++stats_->levels; }

 private:
  std::vector<double> take(int from, int tag, bool collective);
  bool reduce_node(const Group& group, std::size_t lo, std::size_t hi, std::size_t owner, std::size_t me,
                   std::vector<double>& acc, int tag);
  void broadcast_node(const Group& group, std::size_t lo, std::size_t hi, std::size_t owner, std::size_t me,
                      std::vector<double>& buffer, int tag);

  Transport* transport_;
  RankStats* stats_;
  int rank_;
  int size_;
};

struct ExecutorOptions {
  std::size_t fiber_stack_bytes = std::size_t{1} << 20;
  /// A threaded recv blocked longer than this is reported as Deadlock.
  std::chrono::milliseconds recv_timeout{60'000};
};

/// p ranks plus their accumulated communication counters.
class World {
 public:
  explicit World(int size);

  [[nodiscard]] int size() const noexcept { return size_; }
  [[nodiscard]] const CommStats& stats() const noexcept { return stats_; }

  /// Runs `body` once per rank under the chosen executor and returns when all ranks finish.
  ///
  /// Simulator: single-threaded cooperative fibers scheduled round-robin in rank order;
  /// a rank runs until it blocks in recv. A full sweep with no runnable rank while some
  /// rank is still waiting raises Deadlock (MissingParticipant if it waits inside a
  /// collective on a rank that already finished).
  /// Threads: one std::thread per rank; blocked receives time out into Deadlock.
  /// The first exception raised by any rank is rethrown after all ranks are unwound.
  void run(ExecutorKind kind, const std::function<void(Comm&)>& body, const ExecutorOptions& options = {});

 private:
  int size_;
  CommStats stats_;
};

[[nodiscard]] CommStats stats_snapshot(const World& world);

}  // namespace axisolve::comm
