#include <random>
#include <sstream>
#include <stdexcept>

#include "axisolve/comm.hpp"
#include "axisolve/error.hpp"
#include "doctest.h"

using axisolve::Errc;
using axisolve::Error;
using namespace axisolve::comm;

namespace {

constexpr ExecutorKind kBoth[] = {ExecutorKind::Simulator, ExecutorKind::Threads};

ExecutorOptions quick() {
  ExecutorOptions o;
  o.recv_timeout = std::chrono::milliseconds(300);
  return o;
}

Errc run_code(World& w, ExecutorKind kind, const std::function<void(Comm&)>& body) {
  try {
    w.run(kind, body, quick());
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an axisolve::Error");
  return Errc::Io;
}

// Independent statement of the reduction order: halve the sorted member list (ceiling
// to the left), sum each half, add left + right.
double tree_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return v[lo];
  const std::size_t cut = lo + (hi - lo + 1) / 2;
  return tree_sum(v, lo, cut) + tree_sum(v, cut, hi);
}

}  // namespace

TEST_CASE("group helpers") {
  const auto g = Group::range(3, 6, 4);
  CHECK(g.members == std::vector<int>{3, 4, 5, 6});
  CHECK(g.contains(6));
  CHECK_FALSE(g.contains(2));
}

TEST_CASE("world validation and fresh counters") {
  CHECK_THROWS_AS(World(0), Error);
  World w(5);
  const auto s = stats_snapshot(w);
  REQUIRE(s.ranks.size() == 5);
  for (const auto& r : s.ranks) CHECK(r == RankStats{});
}

TEST_CASE("point-to-point delivery") {
  for (auto kind : kBoth) {
    CAPTURE(to_string(kind));
    World w(4);
    std::vector<double> got;
    std::vector<double> second;
    w.run(kind, [&](Comm& c) {
      if (c.rank() == 3) {
        c.send(4, 0, std::vector<double>{1.25});
        c.send(4, 0, std::vector<double>{2.5, 3.5});
      }
      if (c.rank() == 4) {
        got = c.recv(3, 0);
        second = c.recv(3, 0);
      }
    });
    CHECK(got == std::vector<double>{1.25});
    CHECK(second == std::vector<double>{2.5, 3.5});
    CHECK(w.stats().ranks[2].msgs_sent == 2);
    CHECK(w.stats().ranks[2].scalars_sent == 3);
    CHECK(w.stats().ranks[3].msgs_sent == 0);
  }
}

TEST_CASE("tags separate channels") {
  for (auto kind : kBoth) {
    World w(2);
    double a = 0, b = 0;
    w.run(kind, [&](Comm& c) {
      if (c.rank() == 1) {
        c.send(2, 7, std::vector<double>{7.0});
        c.send(2, 8, std::vector<double>{8.0});
      } else {
        b = c.recv(1, 8).front();
        a = c.recv(1, 7).front();
      }
    });
    CHECK(a == 7.0);
    CHECK(b == 8.0);
  }
}

TEST_CASE("invalid endpoints") {
  World w(2);
  CHECK(run_code(w, ExecutorKind::Simulator, [](Comm& c) { c.send(3, 0, {}); }) == Errc::IndexOutOfRange);
  CHECK(run_code(w, ExecutorKind::Simulator, [](Comm& c) { c.send(c.rank(), 0, {}); }) == Errc::DomainError);
}

TEST_CASE("unmatched receive is a deadlock") {
  for (auto kind : kBoth) {
    World w(3);
    CHECK(run_code(w, kind, [](Comm& c) {
            if (c.rank() == 2) (void)c.recv(1, 0);
          }) == Errc::Deadlock);
  }
  World w(2);
  CHECK(run_code(w, ExecutorKind::Simulator, [](Comm& c) { (void)c.recv(c.rank() == 1 ? 2 : 1, 0); }) ==
        Errc::Deadlock);
}

TEST_CASE("rank failure propagates and unwinds the others") {
  for (auto kind : kBoth) {
    World w(4);
    int finished = 0;
    std::string message;
    try {
      w.run(
          kind,
          [&](Comm& c) {
            if (c.rank() == 3) throw std::logic_error("boom on 3");
            if (c.rank() == 1) {
              (void)c.recv(3, 0);
              ++finished;
            }
          },
          quick());
    } catch (const std::logic_error& e) {
      message = e.what();
    }
    CHECK(message == "boom on 3");
    CHECK(finished == 0);
  }
}

TEST_CASE("reduce examples") {
  for (auto kind : kBoth) {
    CAPTURE(to_string(kind));
    World w(3);
    std::optional<std::vector<double>> at_root;
    w.run(kind, [&](Comm& c) {
      auto r = c.reduce_sum_to_root(Group::range(1, 3, 2), std::vector<double>{static_cast<double>(c.rank())}, 0);
      if (c.rank() == 2) {
        at_root = r;
      } else {
        CHECK_FALSE(r.has_value());
      }
    });
    REQUIRE(at_root.has_value());
    CHECK(*at_root == std::vector<double>{6.0});
  }

  World single(2);
  std::vector<double> id;
  single.run(ExecutorKind::Simulator, [&](Comm& c) {
    if (c.rank() == 2) id = *c.reduce_sum_to_root(Group{{2}, 2}, std::vector<double>{4.5, -1.0}, 0);
  });
  CHECK(id == std::vector<double>{4.5, -1.0});
  CHECK(single.stats().total().msgs_sent == 0);
  CHECK(single.stats().ranks[1].tree_levels == 0);

  World seven(7);
  double sum = 0;
  seven.run(ExecutorKind::Simulator, [&](Comm& c) {
    auto r = c.reduce_sum_to_root(Group::range(1, 7, 1), std::vector<double>{static_cast<double>(c.rank())}, 0);
    if (r) sum = r->front();
  });
  CHECK(sum == 28.0);
  CHECK(seven.stats().total().tree_levels == 3);
  CHECK(seven.stats().total().msgs_sent == 6);
}

TEST_CASE("reduce over four ranks moves three scalars") {
  World w(4);
  w.run(ExecutorKind::Simulator, [&](Comm& c) {
    (void)c.reduce_sum_to_root(Group::range(1, 4, 1), std::vector<double>{1.0}, 0);
  });
  CHECK(w.stats().total().scalars_sent == 3);
  CHECK(w.stats().total().reduces == 4);
}

TEST_CASE("reduce edge count is p-1 for every root and size") {
  for (int p = 1; p <= 16; ++p) {
    for (int root = 1; root <= p; ++root) {
      World w(p);
      const std::size_t k = 3;
      w.run(ExecutorKind::Simulator, [&](Comm& c) {
        (void)c.reduce_sum_to_root(Group::range(1, p, root), std::vector<double>(k, 1.0), 0);
      });
      REQUIRE(w.stats().total().msgs_sent == static_cast<std::uint64_t>(p - 1));
      REQUIRE(w.stats().total().scalars_sent == static_cast<std::uint64_t>((p - 1) * k));
    }
  }
}

TEST_CASE("reduce order is fixed and executor independent") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int p : {2, 3, 5, 7, 8, 13, 16}) {
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<double> values(static_cast<std::size_t>(p));
      for (auto& v : values) v = u(rng) * std::pow(10.0, static_cast<double>(rng() % 12) - 6);
      const int root = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(p));
      const double expected = tree_sum(values, 0, values.size());
      for (auto kind : kBoth) {
        World w(p);
        double got = 0;
        w.run(kind, [&](Comm& c) {
          auto r = c.reduce_sum_to_root(Group::range(1, p, root),
                                        std::vector<double>{values[static_cast<std::size_t>(c.rank() - 1)]}, 5);
          if (r) got = r->front();
        });
        CHECK(got == expected);  // bitwise
      }
    }
  }
}

TEST_CASE("sparse group reduce and broadcast") {
  for (auto kind : kBoth) {
    World w(9);
    const Group g{{2, 3, 5, 8, 9}, 5};
    std::vector<double> result;
    std::vector<std::vector<double>> received(9);
    w.run(kind, [&](Comm& c) {
      if (!g.contains(c.rank())) return;
      auto r = c.reduce_sum_to_root(g, std::vector<double>{1.0, static_cast<double>(c.rank())}, 1);
      if (r) result = *r;
      received[static_cast<std::size_t>(c.rank() - 1)] =
          c.broadcast(g, c.rank() == g.root ? std::vector<double>{42.0, 43.0} : std::vector<double>{}, 2);
    });
    CHECK(result == std::vector<double>{5.0, 27.0});
    for (int m : g.members) CHECK(received[static_cast<std::size_t>(m - 1)] == std::vector<double>{42.0, 43.0});
  }
}

TEST_CASE("allreduce") {
  for (auto kind : kBoth) {
    World w(6);
    std::vector<double> seen(6);
    w.run(kind, [&](Comm& c) {
      double s = c.allreduce_sum(static_cast<double>(c.rank()), 3);
      s += c.allreduce_sum(1.0, 3);
      seen[static_cast<std::size_t>(c.rank() - 1)] = s;
    });
    for (double s : seen) CHECK(s == 27.0);
  }
}

TEST_CASE("reduce errors") {
  for (auto kind : kBoth) {
    World w(3);
    CHECK(run_code(w, kind, [](Comm& c) {
            (void)c.reduce_sum_to_root(Group::range(1, 3, 1), std::vector<double>(c.rank() == 3 ? 2 : 1, 1.0), 0);
          }) == Errc::MismatchedLength);
  }
  World w(3);
  CHECK(run_code(w, ExecutorKind::Simulator, [](Comm& c) {
          if (c.rank() == 2) return;
          (void)c.reduce_sum_to_root(Group::range(1, 3, 1), std::vector<double>{1.0}, 0);
        }) == Errc::MissingParticipant);
  CHECK(run_code(w, ExecutorKind::Simulator, [](Comm& c) {
          (void)c.reduce_sum_to_root(Group{{1, 2}, 3}, std::vector<double>{1.0}, 0);
        }) == Errc::DomainError);
  CHECK(run_code(w, ExecutorKind::Simulator, [](Comm& c) {
          (void)c.reduce_sum_to_root(Group{{2, 1, 3}, 1}, std::vector<double>{1.0}, 0);
        }) == Errc::DomainError);
}

TEST_CASE("counters, levels and CSV") {
  World w(2);
  w.run(ExecutorKind::Simulator, [](Comm& c) {
    c.enter_level();
    if (c.rank() == 1) c.send(2, 0, std::vector<double>{1, 2, 3});
    if (c.rank() == 2) (void)c.recv(1, 0);
  });
  const auto before = stats_snapshot(w);
  w.run(ExecutorKind::Simulator, [](Comm& c) { (void)c.allreduce_sum(1.0, 0); });
  const auto delta = stats_snapshot(w) - before;
  CHECK(delta.total().msgs_sent == 2);
  CHECK(delta.total().levels == 0);
  CHECK(before.total().levels == 1);

  std::ostringstream csv;
  before.write_csv(csv);
  CHECK(csv.str() == "rank,msgs_sent,scalars_sent,reduces,allreduces,levels,tree_levels\n1,1,3,0,0,1,0\n2,0,0,0,0,1,0\n");
}

TEST_CASE("executor names") {
  CHECK(parse_executor("sim") == ExecutorKind::Simulator);
  CHECK(parse_executor("threads") == ExecutorKind::Threads);
  CHECK_THROWS_AS((void)parse_executor("mpi"), Error);
}
