#include "axisolve/comm.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <string>

#include "axisolve/error.hpp"
#include "comm_executors.hpp"
#include "comm_transport.hpp"

namespace axisolve::comm {

namespace {

std::uint64_t ceil_log2(std::size_t n) {
  return n <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(n - 1));
}

std::size_t index_of(const Group& group, int rank) {
  const auto it = std::lower_bound(group.members.begin(), group.members.end(), rank);
  return static_cast<std::size_t>(it - group.members.begin());
}

void validate(const Group& group, int rank, int world_size) {
  if (group.members.empty()) throw Error(Errc::DomainError, "empty group");
  for (std::size_t i = 0; i < group.members.size(); ++i) {
    const int m = group.members[i];
    if (m < 1 || m > world_size) throw Error(Errc::IndexOutOfRange, "group member " + std::to_string(m));
    if (i > 0 && group.members[i - 1] >= m) throw Error(Errc::DomainError, "group members not strictly increasing");
  }
  if (!group.contains(group.root)) throw Error(Errc::DomainError, "group root " + std::to_string(group.root) + " is not a member");
  if (!group.contains(rank)) throw Error(Errc::DomainError, "rank " + std::to_string(rank) + " is not a group member");
}

}  // namespace

Group Group::range(int lo, int hi, int root) {
  Group g;
  for (int r = lo; r <= hi; ++r) g.members.push_back(r);
  g.root = root;
  return g;
}

bool Group::contains(int rank) const noexcept { return std::binary_search(members.begin(), members.end(), rank); }

RankStats CommStats::total() const {
  RankStats t;
  for (const auto& r : ranks) {
    t.msgs_sent += r.msgs_sent;
    t.scalars_sent += r.scalars_sent;
    t.reduces += r.reduces;
    t.levels = std::max(t.levels, r.levels);
    t.tree_levels = std::max(t.tree_levels, r.tree_levels);
    t.allreduces += r.allreduces;
  }
  return t;
}

void CommStats::write_csv(std::ostream& out) const {
  out << "rank,msgs_sent,scalars_sent,reduces,allreduces,levels,tree_levels\n";
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    const auto& r = ranks[i];
    out << i + 1 << ',' << r.msgs_sent << ',' << r.scalars_sent << ',' << r.reduces << ',' << r.allreduces << ','
        << r.levels << ',' << r.tree_levels << '\n';
  }
}

CommStats operator-(const CommStats& after, const CommStats& before) {
  if (after.ranks.size() != before.ranks.size()) throw Error(Errc::DimensionMismatch, "stats of different worlds");
  CommStats d;
  d.ranks.resize(after.ranks.size());
  for (std::size_t i = 0; i < after.ranks.size(); ++i) {
    const auto& a = after.ranks[i];
    const auto& b = before.ranks[i];
    d.ranks[i] = {a.msgs_sent - b.msgs_sent, a.scalars_sent - b.scalars_sent, a.reduces - b.reduces,
                  a.levels - b.levels, a.tree_levels - b.tree_levels, a.allreduces - b.allreduces};
  }
  return d;
}

ExecutorKind parse_executor(std::string_view name) {
  if (name == "sim" || name == "simulator") return ExecutorKind::Simulator;
  if (name == "threads") return ExecutorKind::Threads;
  throw Error(Errc::Config, "unknown executor '" + std::string(name) + "' (expected sim or threads)");
}

std::string_view to_string(ExecutorKind kind) noexcept {
  return kind == ExecutorKind::Simulator ? "sim" : "threads";
}

void Comm::send(int to, int tag, std::span<const double> payload) {
  if (to < 1 || to > size_) throw Error(Errc::IndexOutOfRange, "send to rank " + std::to_string(to));
  if (to == rank_) throw Error(Errc::DomainError, "send to self on rank " + std::to_string(rank_));
  ++stats_->msgs_sent;
  stats_->scalars_sent += payload.size();
  transport_->post(rank_, to, tag, std::vector<double>(payload.begin(), payload.end()));
}

std::vector<double> Comm::recv(int from, int tag) { return take(from, tag, false); }

std::vector<double> Comm::take(int from, int tag, bool collective) {
  if (from < 1 || from > size_) throw Error(Errc::IndexOutOfRange, "recv from rank " + std::to_string(from));
  if (from == rank_) throw Error(Errc::DomainError, "recv from self on rank " + std::to_string(rank_));
  return transport_->take(rank_, from, tag, collective);
}

bool Comm::reduce_node(const Group& group, std::size_t lo, std::size_t hi, std::size_t owner, std::size_t me,
                       std::vector<double>& acc, int tag) {
  if (hi - lo == 1) return true;
  const std::size_t cut = lo + (hi - lo + 1) / 2;
  const bool owner_left = owner < cut;
  const std::size_t left_owner = owner_left ? owner : cut - 1;
  const std::size_t right_owner = owner_left ? cut : owner;
  const bool active = me < cut ? reduce_node(group, lo, cut, left_owner, me, acc, tag)
                               : reduce_node(group, cut, hi, right_owner, me, acc, tag);
  if (!active) return false;
  if (me != owner) {
    send(group.members[owner], tag, acc);
    return false;
  }
  const std::size_t other = owner_left ? right_owner : left_owner;
  const auto part = take(group.members[other], tag, true);
  if (part.size() != acc.size()) {
    throw Error(Errc::MismatchedLength, "reduce contribution of length " + std::to_string(part.size()) + " from rank " +
                                            std::to_string(group.members[other]) + ", expected " +
                                            std::to_string(acc.size()));
  }
  if (owner_left) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = acc[i] + part[i];
  } else {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = part[i] + acc[i];
  }
  return true;
}

std::optional<std::vector<double>> Comm::reduce_sum_to_root(const Group& group, std::span<const double> contribution,
                                                            int tag) {
  validate(group, rank_, size_);
  ++stats_->reduces;
  stats_->tree_levels += ceil_log2(group.members.size());
  std::vector<double> acc(contribution.begin(), contribution.end());
  reduce_node(group, 0, group.members.size(), index_of(group, group.root), index_of(group, rank_), acc, tag);
  if (rank_ != group.root) return std::nullopt;
  return acc;
}

void Comm::broadcast_node(const Group& group, std::size_t lo, std::size_t hi, std::size_t owner, std::size_t me,
                          std::vector<double>& buffer, int tag) {
  if (hi - lo == 1) return;
  const std::size_t cut = lo + (hi - lo + 1) / 2;
  const bool owner_left = owner < cut;
  const std::size_t left_owner = owner_left ? owner : cut - 1;
  const std::size_t right_owner = owner_left ? cut : owner;
  const std::size_t other = owner_left ? right_owner : left_owner;
  if (me == owner) send(group.members[other], tag, buffer);
  if (me == other) buffer = take(group.members[owner], tag, true);
  if (me < cut) {
    broadcast_node(group, lo, cut, left_owner, me, buffer, tag);
  } else {
    broadcast_node(group, cut, hi, right_owner, me, buffer, tag);
  }
}

std::vector<double> Comm::broadcast(const Group& group, std::span<const double> payload, int tag) {
  validate(group, rank_, size_);
  std::vector<double> buffer;
  if (rank_ == group.root) buffer.assign(payload.begin(), payload.end());
  broadcast_node(group, 0, group.members.size(), index_of(group, group.root), index_of(group, rank_), buffer, tag);
  return buffer;
}

std::vector<double> Comm::allreduce_sum(std::span<const double> contribution, int tag) {
  const Group all = Group::range(1, size_, 1);
  ++stats_->allreduces;
  auto sum = reduce_sum_to_root(all, contribution, tag);
  return broadcast(all, sum ? std::span<const double>(*sum) : std::span<const double>(), tag);
}

double Comm::allreduce_sum(double contribution, int tag) {
  return allreduce_sum(std::span<const double>(&contribution, 1), tag).front();
}

World::World(int size) : size_(size) {
  if (size < 1) throw Error(Errc::DomainError, "world of " + std::to_string(size) + " ranks");
  stats_.ranks.resize(static_cast<std::size_t>(size));
}

void World::run(ExecutorKind kind, const std::function<void(Comm&)>& body, const ExecutorOptions& options) {
  if (kind == ExecutorKind::Simulator) {
    run_simulated(size_, stats_, body, options);
  } else {
    run_threaded(size_, stats_, body, options);
  }
}

CommStats stats_snapshot(const World& world) { return world.stats(); }

}  // namespace axisolve::comm
