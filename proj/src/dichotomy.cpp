#include "axisolve/dichotomy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <numeric>
#include <ostream>
#include <string>

#include "axisolve/error.hpp"
#include "axisolve/kernels.hpp"

namespace axisolve {

namespace {

constexpr double kRatioGuard = 1e-280;

double guarded_ratio(double num, double den, int rank, const char* what) {
  if (!(std::abs(den) >= kRatioGuard)) {
    throw Error(Errc::SingularPlan, std::string(what) + " divisor " + std::to_string(den) + " on rank " +
                                        std::to_string(rank));
  }
  return num / den;
}

RankPlan make_rank_plan(const TridiagonalMatrix& a, const ThomasFactorization& at, const Partition& part, int r) {
  const std::size_t n = a.order();
  RankPlan rp;
  rp.first = part.first(r);
  rp.last = part.last(r);

  std::vector<double> unit(n, 0.0);
  unit[rp.first - 1] = 1.0;
  rp.green_left = at.solve(unit);
  unit[rp.first - 1] = 0.0;
  unit[rp.last - 1] = 1.0;
  rp.green_right = at.solve(unit);

  if (rp.first > 1) {
    const std::size_t k = rp.first - 1;
    std::vector<double> rhs(k, 0.0);
    rhs[k - 1] = -a.a(k);
    rp.z_left = ThomasFactorization(submatrix(a, 1, k)).solve(rhs);
    rp.z_left.push_back(1.0);
    rp.z_left_inner = rp.z_left[k - 1];
  } else {
    rp.z_left = {1.0};
  }

  if (rp.last < n) {
    const std::size_t k = n - rp.last;
    std::vector<double> rhs(k, 0.0);
    rhs[0] = -a.c(rp.last + 1);
    const auto tail = ThomasFactorization(submatrix(a, rp.last + 1, n)).solve(rhs);
    rp.z_right.reserve(k + 1);
    rp.z_right.push_back(1.0);
    rp.z_right.insert(rp.z_right.end(), tail.begin(), tail.end());
    rp.z_right_inner = rp.z_right[1];
  } else {
    rp.z_right = {1.0};
  }

  rp.ratio_first = guarded_ratio(rp.green_left[rp.last - 1], rp.green_right[rp.last - 1], r, "G^R(m_R)");
  rp.ratio_last = guarded_ratio(rp.green_right[rp.first - 1], rp.green_left[rp.first - 1], r, "G^L(m_L)");

  if (rp.last - rp.first >= 2) {
    rp.interior.emplace(submatrix(a, rp.first + 1, rp.last - 1));
    rp.couple_first = a.c(rp.first + 1);
    rp.couple_last = a.a(rp.last - 1);
  }
  return rp;
}

void hash_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

void hash_values(std::uint64_t& h, std::span<const double> v) { hash_bytes(h, v.data(), v.size_bytes()); }

const SplitNode* node_of(const std::vector<SplitNode>& level, int rank) {
  for (const auto& node : level) {
    if (node.lo <= rank && rank <= node.hi) return &node;
  }
  return nullptr;
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0)) throw Error(Errc::DomainError, std::string(name) + " must be non-negative");
}

}  // namespace

Partition::Partition(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw Error(Errc::InvalidPartition, "partition with no ranks");
  offsets_.assign(sizes_.size() + 1, 0);
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] < 2) {
      throw Error(Errc::InvalidPartition,
                  "rank " + std::to_string(i + 1) + " owns " + std::to_string(sizes_[i]) + " unknowns, need at least 2");
    }
    offsets_[i + 1] = offsets_[i] + sizes_[i];
  }
}

Partition Partition::balanced(std::size_t n, int ranks) {
  if (ranks < 1 || n < 2 * static_cast<std::size_t>(ranks)) {
    throw Error(Errc::InvalidPartition,
                std::to_string(n) + " unknowns cannot be split over " + std::to_string(ranks) + " ranks");
  }
  const auto p = static_cast<std::size_t>(ranks);
  std::vector<std::size_t> sizes(p, n / p);
  for (std::size_t i = 0; i < n % p; ++i) ++sizes[i];
  return Partition(std::move(sizes));
}

std::vector<std::vector<SplitNode>> split_levels(int ranks) {
  std::vector<std::vector<SplitNode>> levels;
  if (ranks < 2) return levels;
  std::vector<SplitNode> current{{1, ranks, (1 + ranks + 1) / 2}};
  while (!current.empty()) {
    std::vector<SplitNode> next;
    for (const auto& node : current) {
      if (node.hi - node.lo < 2) continue;
      for (const auto& [lo, hi] : {std::pair{node.lo, node.mid - 1}, std::pair{node.mid + 1, node.hi}}) {
        next.push_back({lo, hi, (lo + hi + 1) / 2});
      }
    }
    levels.push_back(std::move(current));
    current = std::move(next);
  }
  return levels;
}

DichotomyPlan::DichotomyPlan(Partition partition, std::vector<RankPlan> ranks, std::optional<ThomasFactorization> whole)
    : partition_(std::move(partition)),
      ranks_(std::move(ranks)),
      levels_(split_levels(partition_.ranks())),
      whole_(std::move(whole)) {}

std::uint64_t DichotomyPlan::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& r : ranks_) {
    hash_values(h, r.green_left);
    hash_values(h, r.green_right);
    hash_values(h, r.z_left);
    hash_values(h, r.z_right);
    const double scalars[] = {r.ratio_first, r.ratio_last, r.z_left_inner, r.z_right_inner, r.couple_first,
                              r.couple_last};
    hash_values(h, scalars);
    hash_bytes(h, &r.first, sizeof r.first);
    hash_bytes(h, &r.last, sizeof r.last);
  }
  return h;
}

DichotomyPlan build_plan(const TridiagonalMatrix& matrix, const Partition& partition) {
  if (partition.order() != matrix.order()) {
    throw Error(Errc::InvalidPartition, "partition covers " + std::to_string(partition.order()) +
                                            " unknowns, matrix has order " + std::to_string(matrix.order()));
  }
  const int p = partition.ranks();
  const ThomasFactorization transposed(matrix.transpose());
  std::vector<RankPlan> ranks(static_cast<std::size_t>(p));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (kernels::parallel() && p > 1)
  for (int r = 1; r <= p; ++r) {
    try {
      ranks[static_cast<std::size_t>(r - 1)] = make_rank_plan(matrix, transposed, partition, r);
    } catch (...) {
#pragma omp critical(axisolve_plan_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::optional<ThomasFactorization> whole;
  if (p == 1) whole.emplace(matrix);
  return DichotomyPlan(partition, std::move(ranks), std::move(whole));
}

Betas local_betas(const DichotomyPlan& plan, int rank, std::span<const double> rhs_local) {
  if (rank < 1 || rank > plan.ranks()) throw Error(Errc::IndexOutOfRange, "rank " + std::to_string(rank));
  const RankPlan& rp = plan.rank(rank);
  const std::size_t len = rp.last - rp.first + 1;
  if (rhs_local.size() != len) {
    throw Error(Errc::DimensionMismatch, "local rhs of length " + std::to_string(rhs_local.size()) + " on rank " +
                                             std::to_string(rank) + ", block has " + std::to_string(len));
  }
  Betas b;
  const double* gl = rp.green_left.data() + (rp.first - 1);
  const double* gr = rp.green_right.data() + (rp.first - 1);
  for (std::size_t i = 0; i < len; ++i) {
    b.left += rhs_local[i] * gl[i];
    b.right += rhs_local[i] * gr[i];
  }
  return b;
}

void DichotomyTrace::append(const DichotomyTrace& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  messages.insert(messages.end(), other.messages.begin(), other.messages.end());
}

void DichotomyTrace::sort() {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const TraceRow& x, const TraceRow& y) { return std::pair{x.level, x.rank} < std::pair{y.level, y.rank}; });
  std::stable_sort(messages.begin(), messages.end(), [](const TraceMessage& x, const TraceMessage& y) {
    return std::tuple{x.level, x.is_delta, x.from, x.to} < std::tuple{y.level, y.is_delta, y.from, y.to};
  });
}

void DichotomyTrace::write_csv(std::ostream& out) const {
  out << "level,rank,role,scalars_sent\n";
  for (const auto& row : rows) {
    const char* role = row.role == TraceRole::LeftGroup ? "left-group"
                       : row.role == TraceRole::Middle  ? "middle"
                                                        : "right-group";
    out << row.level << ',' << row.rank << ',' << role << ',' << row.scalars_sent << '\n';
  }
}

void DichotomyTrace::write_messages_csv(std::ostream& out) const {
  out << "level,from,to,kind,scalars\n";
  for (const auto& m : messages) {
    out << m.level << ',' << m.from << ',' << m.to << ',' << (m.is_delta ? "delta" : "chi") << ',' << m.scalars << '\n';
  }
}

void solve_on_rank(comm::Comm& comm, std::span<const LocalSystem> systems, DichotomyTrace* trace) {
  if (systems.empty()) return;
  const DichotomyPlan& lead = *systems.front().plan;
  const Partition& part = lead.partition();
  const int p = part.ranks();
  const int me = comm.rank();
  if (comm.size() != p) {
    throw Error(Errc::DimensionMismatch, "plan for " + std::to_string(p) + " ranks run on " +
                                             std::to_string(comm.size()));
  }
  const std::size_t len = part.size(me);
  std::size_t width = 0;  // scalars per boundary value, summed over systems
  for (const auto& sys : systems) {
    if (sys.plan == nullptr || !(sys.plan->partition() == part)) {
      throw Error(Errc::InvalidPartition, "batched systems must share one partition");
    }
    if (sys.rhs.size() != len * sys.count || sys.solution.size() != len * sys.count) {
      throw Error(Errc::DimensionMismatch, "local slices do not match the block of rank " + std::to_string(me));
    }
    width += sys.count;
  }

  if (p == 1) {
    for (const auto& sys : systems) sys.plan->whole()->solve_batch(sys.rhs, sys.solution, sys.count);
    return;
  }

  // Running boundary sums, one entry per (system, rhs) pair in system-major order.
  std::vector<double> beta_left(width), beta_right(width);
  std::vector<double> first(width), last(width);
  {
    std::size_t slot = 0;
    for (const auto& sys : systems) {
      for (std::size_t j = 0; j < sys.count; ++j, ++slot) {
        const Betas b = local_betas(*sys.plan, me, sys.rhs.subspan(j * len, len));
        beta_left[slot] = b.left;
        beta_right[slot] = b.right;
      }
    }
  }

  // Per-slot view of a rank-plan scalar or vector entry.
  auto for_slots = [&](auto&& fn) {
    std::size_t slot = 0;
    for (const auto& sys : systems) {
      const RankPlan& rp = sys.plan->rank(me);
      for (std::size_t j = 0; j < sys.count; ++j, ++slot) fn(slot, rp);
    }
  };
  auto resolve_here = [&] {
    first = beta_left;
    last = beta_right;
  };

  std::vector<double> payload(width);
  const auto& levels = lead.levels();
  for (std::size_t s = 0; s < levels.size(); ++s) {
    comm.enter_level();
    const SplitNode* node = node_of(levels[s], me);
    if (node == nullptr) continue;
    const int level = static_cast<int>(s) + 1;
    const int tag = kDichotomyTagBase + 8 * static_cast<int>(s);
    const std::uint64_t sent_before = comm.stats().scalars_sent;
    TraceRole role = TraceRole::Middle;
    auto note = [&](int from, int to, bool is_delta) {
      if (trace != nullptr) trace->messages.push_back({level, from, to, is_delta, width});
    };

    if (node->lo == node->hi) {
      resolve_here();
    } else if (me < node->mid) {
      role = TraceRole::LeftGroup;
      const std::size_t k1 = part.first(node->mid);
      for_slots([&](std::size_t slot, const RankPlan& rp) { payload[slot] = beta_right[slot] * rp.z_right[k1 - rp.last]; });
      auto chi = comm.reduce_sum_to_root(comm::Group::range(node->lo, node->mid - 1, node->mid - 1), payload, tag);
      if (me == node->mid - 1) {
        comm.send(node->mid, tag + 1, *chi);
        note(me, node->mid, false);
        const auto delta = comm.recv(node->mid, tag + 2);
        for_slots([&](std::size_t slot, const RankPlan& rp) {
          beta_right[slot] += delta[slot];
          beta_left[slot] += delta[slot] * rp.ratio_first;
        });
        if (node->hi - node->lo == 1) resolve_here();
      }
    } else if (me > node->mid) {
      role = TraceRole::RightGroup;
      const std::size_t k2 = part.last(node->mid);
      for_slots([&](std::size_t slot, const RankPlan& rp) { payload[slot] = beta_left[slot] * rp.z_left[k2 - 1]; });
      auto chi = comm.reduce_sum_to_root(comm::Group::range(node->mid + 1, node->hi, node->mid + 1), payload, tag + 3);
      if (me == node->mid + 1) {
        comm.send(node->mid, tag + 4, *chi);
        note(me, node->mid, false);
        const auto delta = comm.recv(node->mid, tag + 5);
        for_slots([&](std::size_t slot, const RankPlan& rp) {
          beta_left[slot] += delta[slot];
          beta_right[slot] += delta[slot] * rp.ratio_last;
        });
      }
    } else {
      std::vector<double> chi_left(width, 0.0), chi_right(width, 0.0);
      if (me > node->lo) chi_left = comm.recv(me - 1, tag + 1);
      if (me < node->hi) chi_right = comm.recv(me + 1, tag + 4);
      for_slots([&](std::size_t slot, const RankPlan& rp) {
        first[slot] = chi_left[slot] + chi_right[slot] * rp.ratio_first + beta_left[slot];
        last[slot] = chi_left[slot] * rp.ratio_last + chi_right[slot] + beta_right[slot];
      });
      if (me > node->lo) {
        for_slots([&](std::size_t slot, const RankPlan& rp) { payload[slot] = (first[slot] - chi_left[slot]) * rp.z_left_inner; });
        comm.send(me - 1, tag + 2, payload);
        note(me, me - 1, true);
      }
      if (me < node->hi) {
        for_slots([&](std::size_t slot, const RankPlan& rp) { payload[slot] = (last[slot] - chi_right[slot]) * rp.z_right_inner; });
        comm.send(me + 1, tag + 5, payload);
        note(me, me + 1, true);
      }
    }
    if (trace != nullptr) trace->rows.push_back({level, me, role, comm.stats().scalars_sent - sent_before});
  }

  // Interior unknowns from the two resolved end values.
  std::size_t slot = 0;
  for (const auto& sys : systems) {
    const RankPlan& rp = sys.plan->rank(me);
    for (std::size_t j = 0; j < sys.count; ++j, ++slot) {
      const auto f = sys.rhs.subspan(j * len, len);
      const auto x = sys.solution.subspan(j * len, len);
      x[0] = first[slot];
      x[len - 1] = last[slot];
      if (!rp.interior) continue;
      const auto inner = x.subspan(1, len - 2);
      std::copy(f.begin() + 1, f.end() - 1, inner.begin());
      inner.front() -= rp.couple_first * first[slot];
      inner.back() -= rp.couple_last * last[slot];
      rp.interior->solve(inner, inner);
    }
  }
}

std::vector<double> solve_many(const DichotomyPlan& plan, std::span<const double> rhs, std::size_t count,
                               comm::World& world, comm::ExecutorKind kind, DichotomyTrace* trace) {
  const std::size_t n = plan.order();
  if (rhs.size() != n * count) {
    throw Error(Errc::DimensionMismatch, "rhs batch of length " + std::to_string(rhs.size()) + ", expected " +
                                             std::to_string(n * count));
  }
  if (world.size() != plan.ranks()) {
    throw Error(Errc::DimensionMismatch, "plan for " + std::to_string(plan.ranks()) + " ranks, world has " +
                                             std::to_string(world.size()));
  }
  const Partition& part = plan.partition();
  std::vector<double> solution(n * count);
  std::vector<DichotomyTrace> traces(static_cast<std::size_t>(world.size()));
  world.run(kind, [&](comm::Comm& c) {
    const int r = c.rank();
    const std::size_t len = part.size(r);
    const std::size_t off = part.first(r) - 1;
    std::vector<double> local_rhs(len * count), local_x(len * count);
    for (std::size_t j = 0; j < count; ++j) {
      std::copy_n(rhs.begin() + static_cast<std::ptrdiff_t>(j * n + off), len,
                  local_rhs.begin() + static_cast<std::ptrdiff_t>(j * len));
    }
    const LocalSystem sys{&plan, local_rhs, local_x, count};
    solve_on_rank(c, std::span(&sys, 1), trace != nullptr ? &traces[static_cast<std::size_t>(r - 1)] : nullptr);
    for (std::size_t j = 0; j < count; ++j) {
      std::copy_n(local_x.begin() + static_cast<std::ptrdiff_t>(j * len), len,
                  solution.begin() + static_cast<std::ptrdiff_t>(j * n + off));
    }
  });
  if (trace != nullptr) {
    for (const auto& t : traces) trace->append(t);
    trace->sort();
  }
  return solution;
}

std::vector<double> dichotomy_solve(const DichotomyPlan& plan, std::span<const double> rhs, comm::World& world,
                                    comm::ExecutorKind kind, DichotomyTrace* trace) {
  return solve_many(plan, rhs, 1, world, kind, trace);
}

double predict_time_dichotomy(double p, double l, double alpha, double beta, double gamma) {
  if (!(p >= 2.0)) throw Error(Errc::DomainError, "dichotomy cost model needs p >= 2");
  require_nonnegative(l, "l");
  require_nonnegative(alpha, "alpha");
  require_nonnegative(beta, "beta");
  require_nonnegative(gamma, "gamma");
  const double lg = std::log2(p);
  return alpha * (lg + 1.0) * lg + 2.0 * l * (lg - (p - 1.0) / p) * (gamma + beta / 2.0);
}

double predict_time_cyclic(double p, double l, double alpha, double beta, double gamma) {
  if (!(p >= 2.0)) throw Error(Errc::DomainError, "cyclic reduction cost model needs p >= 2");
  require_nonnegative(l, "l");
  require_nonnegative(alpha, "alpha");
  require_nonnegative(beta, "beta");
  require_nonnegative(gamma, "gamma");
  return 2.0 * std::log2(p) * (alpha + l * beta + l * gamma);
}

}  // namespace axisolve
