#include <cmath>
#include <random>
#include <sstream>

#include "axisolve/dichotomy.hpp"
#include "axisolve/error.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace axisolve;
using comm::ExecutorKind;
using comm::World;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an axisolve::Error");
  return Errc::Io;
}

Partition random_partition(std::mt19937_64& rng, std::size_t n, int p) {
  // Every block gets 2, the rest is scattered uniformly.
  std::vector<std::size_t> sizes(static_cast<std::size_t>(p), 2);
  std::uniform_int_distribution<int> pick(0, p - 1);
  for (std::size_t extra = n - 2 * static_cast<std::size_t>(p); extra > 0; --extra) ++sizes[static_cast<std::size_t>(pick(rng))];
  return Partition(sizes);
}

std::vector<int> middles(const std::vector<SplitNode>& level) {
  std::vector<int> m;
  for (const auto& node : level) m.push_back(node.mid);
  return m;
}

TridiagonalMatrix laplace(std::size_t n) { return TridiagonalMatrix::constant(n, -1, 2, -1); }

}  // namespace

TEST_CASE("partition bookkeeping") {
  const Partition part({3, 2, 4});
  CHECK(part.ranks() == 3);
  CHECK(part.order() == 9);
  CHECK(part.first(1) == 1);
  CHECK(part.last(1) == 3);
  CHECK(part.first(2) == 4);
  CHECK(part.last(2) == 5);
  CHECK(part.first(3) == 6);
  CHECK(part.last(3) == 9);

  const auto bal = Partition::balanced(11, 3);
  CHECK(std::vector<std::size_t>(bal.sizes().begin(), bal.sizes().end()) == std::vector<std::size_t>{4, 4, 3});

  CHECK(code_of([] { Partition({2, 1, 3}); }) == Errc::InvalidPartition);
  CHECK(code_of([] { Partition(std::vector<std::size_t>{}); }) == Errc::InvalidPartition);
  CHECK(code_of([] { (void)Partition::balanced(7, 4); }) == Errc::InvalidPartition);
  CHECK(code_of([] { (void)build_plan(laplace(10), Partition({4, 4})); }) == Errc::InvalidPartition);
}

TEST_CASE("split tree") {
  CHECK(split_levels(1).empty());
  const auto two = split_levels(2);
  REQUIRE(two.size() == 1);
  CHECK(two[0] == std::vector<SplitNode>{{1, 2, 2}});

  const auto seven = split_levels(7);
  REQUIRE(seven.size() == 3);
  CHECK(middles(seven[0]) == std::vector<int>{4});
  CHECK(middles(seven[1]) == std::vector<int>{2, 6});
  CHECK(middles(seven[2]) == std::vector<int>{1, 3, 5, 7});

  for (int k = 1; k <= 6; ++k) {
    CHECK(split_levels(1 << k).size() == static_cast<std::size_t>(k));
    CHECK(split_levels((1 << k) - 1 + (k == 1 ? 1 : 0)).size() == static_cast<std::size_t>(k));
  }
  CHECK(split_levels(3).size() == 2);
  CHECK(split_levels(6).size() == 3);
  CHECK(split_levels(5).size() == 2);  // [1,5] -> [1,2], [4,5]; both two-rank nodes close at level 2

  // every rank is settled exactly once: as a middle, a leaf, or the left end of a two-rank node
  for (int p = 2; p <= 40; ++p) {
    std::vector<int> settled(static_cast<std::size_t>(p) + 1, 0);
    for (const auto& level : split_levels(p)) {
      for (const auto& node : level) {
        ++settled[static_cast<std::size_t>(node.mid)];
        if (node.hi - node.lo == 1) ++settled[static_cast<std::size_t>(node.lo)];
      }
    }
    for (int r = 1; r <= p; ++r) CHECK(settled[static_cast<std::size_t>(r)] == 1);
    CHECK(split_levels(p).size() <= static_cast<std::size_t>(std::ceil(std::log2(p))));
  }
}

TEST_CASE("plan vectors on tridiag(-1,2,-1), n = 4, two ranks") {
  const auto a = laplace(4);
  const auto plan = build_plan(a, Partition({2, 2}));
  const auto& r1 = plan.rank(1);
  CHECK(r1.first == 1);
  CHECK(r1.last == 2);
  const std::vector<double> row2{0.6, 1.2, 0.8, 0.4};
  for (std::size_t i = 0; i < 4; ++i) CHECK(r1.green_right[i] == doctest::Approx(row2[i]).epsilon(1e-14));
  const auto& r2 = plan.rank(2);
  REQUIRE(r2.z_left.size() == 3);
  CHECK(r2.z_left[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(r2.z_left[1] == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(r2.z_left[2] == 1.0);
  CHECK(r1.z_left == std::vector<double>{1.0});
  CHECK(r2.z_right == std::vector<double>{1.0});
  CHECK_FALSE(r1.interior.has_value());

  const auto b = local_betas(plan, 1, std::vector<double>{1, 1});
  CHECK(b.right == doctest::Approx(1.8).epsilon(1e-14));
  const auto zero = local_betas(plan, 2, std::vector<double>{0, 0});
  CHECK(zero.left == 0.0);
  CHECK(zero.right == 0.0);
  CHECK(local_betas(plan, 2, std::vector<double>{1, 0}).left == r2.green_left[2]);
  CHECK(code_of([&] { (void)local_betas(plan, 1, std::vector<double>{1, 1, 1}); }) == Errc::DimensionMismatch);
}

TEST_CASE("single-rank plan keeps the end rows of the inverse") {
  std::mt19937_64 rng(1);
  const auto a = oracle::random_dominant(rng, 9);
  const auto plan = build_plan(a, Partition({9}));
  CHECK(plan.levels().empty());
  const Eigen::MatrixXd inv = oracle::dense(a).inverse();
  for (std::size_t j = 0; j < 9; ++j) {
    CHECK(plan.rank(1).green_left[j] == doctest::Approx(inv(0, static_cast<Eigen::Index>(j))).epsilon(1e-12));
    CHECK(plan.rank(1).green_right[j] == doctest::Approx(inv(8, static_cast<Eigen::Index>(j))).epsilon(1e-12));
  }
}

TEST_CASE("plan invariants on random systems") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 1 + static_cast<int>(rng() % 9);
    const std::size_t n = 2 * static_cast<std::size_t>(p) + rng() % 40;
    const auto a = oracle::random_dominant(rng, n);
    const auto part = random_partition(rng, n, p);
    const auto plan = build_plan(a, part);
    const auto at = a.transpose();
    for (int r = 1; r <= p; ++r) {
      const auto& rp = plan.rank(r);
      std::vector<double> el(n, 0.0), er(n, 0.0);
      el[rp.first - 1] = 1.0;
      er[rp.last - 1] = 1.0;
      CHECK(oracle::max_abs_diff(at.apply(rp.green_left), el) <= 1e-10);
      CHECK(oracle::max_abs_diff(at.apply(rp.green_right), er) <= 1e-10);

      REQUIRE(rp.z_left.size() == rp.first);
      CHECK(rp.z_left.back() == 1.0);
      if (rp.first > 1) {
        const std::size_t k = rp.first - 1;
        std::vector<double> expect(k, 0.0);
        expect[k - 1] = -a.a(k);
        const auto lhs = submatrix(a, 1, k).apply(std::span<const double>(rp.z_left).first(k));
        CHECK(oracle::max_abs_diff(lhs, expect) <= 1e-10);
      }
      REQUIRE(rp.z_right.size() == n - rp.last + 1);
      CHECK(rp.z_right.front() == 1.0);
      if (rp.last < n) {
        const std::size_t k = n - rp.last;
        std::vector<double> expect(k, 0.0);
        expect[0] = -a.c(rp.last + 1);
        const auto lhs = submatrix(a, rp.last + 1, n).apply(std::span<const double>(rp.z_right).subspan(1));
        CHECK(oracle::max_abs_diff(lhs, expect) <= 1e-10);
      }
    }
  }
}

TEST_CASE("plan errors propagate") {
  const TridiagonalMatrix singular({1.0, 1.0, 1.0}, {1.0, 1.0, 2.0, 2.0}, {1.0, 1.0, 1.0});
  CHECK(code_of([&] { (void)build_plan(singular, Partition({2, 2})); }) == Errc::ZeroPivot);
}

TEST_CASE("one rank is the sequential solve, bit for bit") {
  std::mt19937_64 rng(8);
  const auto a = oracle::random_dominant(rng, 50);
  const auto f = oracle::random_vector(rng, 50);
  const auto plan = build_plan(a, Partition({50}));
  World w(1);
  CHECK(dichotomy_solve(plan, f, w) == thomas_solve(a, f));
  CHECK(w.stats().total().levels == 0);
}

TEST_CASE("seven ranks reproduce the three-level protocol") {
  std::mt19937_64 rng(7);
  const auto a = oracle::random_dominant(rng, 28);
  const auto f = oracle::random_vector(rng, 28);
  const auto plan = build_plan(a, Partition(std::vector<std::size_t>(7, 4)));
  World w(7);
  DichotomyTrace trace;
  const auto x = dichotomy_solve(plan, f, w, ExecutorKind::Simulator, &trace);
  CHECK(oracle::rel_error(x, oracle::dense_solve(a, f)) <= 1e-10);
  for (const auto& r : w.stats().ranks) CHECK(r.levels == 3);

  std::vector<std::vector<int>> mids(3);
  for (const auto& row : trace.rows) {
    if (row.role == TraceRole::Middle) mids[static_cast<std::size_t>(row.level - 1)].push_back(row.rank);
  }
  CHECK(mids[0] == std::vector<int>{4});
  CHECK(mids[1] == std::vector<int>{2, 6});
  CHECK(mids[2] == std::vector<int>{1, 3, 5, 7});

  std::vector<std::tuple<int, int, int, bool>> msgs;
  for (const auto& m : trace.messages) msgs.emplace_back(m.level, m.from, m.to, m.is_delta);
  const std::vector<std::tuple<int, int, int, bool>> expected{
      {1, 3, 4, false}, {1, 5, 4, false}, {1, 4, 3, true},  {1, 4, 5, true},  {2, 1, 2, false}, {2, 3, 2, false},
      {2, 5, 6, false}, {2, 7, 6, false}, {2, 2, 1, true},  {2, 2, 3, true},  {2, 6, 5, true},  {2, 6, 7, true}};
  CHECK(msgs == expected);

  std::ostringstream csv;
  trace.write_csv(csv);
  CHECK(csv.str().rfind("level,rank,role,scalars_sent\n1,1,left-group,", 0) == 0);
}

TEST_CASE("two ranks take one level") {
  const auto a = laplace(6);
  const auto plan = build_plan(a, Partition({3, 3}));
  World w(2);
  const std::vector<double> f{1, 2, 3, 4, 5, 6};
  const auto x = dichotomy_solve(plan, f, w);
  CHECK(oracle::rel_error(x, oracle::dense_solve(a, f)) <= 1e-12);
  CHECK(w.stats().total().levels == 1);
}

TEST_CASE("oracle equivalence over random systems and partitions") {
  std::mt19937_64 rng(77);
  const int ps[] = {1, 2, 3, 4, 5, 6, 7, 8, 11, 16};
  for (int trial = 0; trial < 80; ++trial) {
    const int p = ps[trial % 10];
    const std::size_t lo = std::max<std::size_t>(8, 2 * static_cast<std::size_t>(p));
    const std::size_t n = lo + rng() % (512 - lo + 1);
    const auto a = oracle::random_dominant(rng, n);
    const auto part = random_partition(rng, n, p);
    const auto f = oracle::random_vector(rng, n);
    const auto plan = build_plan(a, part);
    World w(p);
    const auto x = dichotomy_solve(plan, f, w);
    CAPTURE(p);
    CAPTURE(n);
    CHECK(oracle::rel_error(x, oracle::dense_solve(a, f)) <= 1e-10);
  }
}

TEST_CASE("a batch shares one plan and leaves it untouched") {
  std::mt19937_64 rng(64);
  const std::size_t n = 96;
  const auto a = oracle::random_dominant(rng, n);
  const auto plan = build_plan(a, Partition::balanced(n, 5));
  const auto sum = plan.checksum();
  const auto rhs = oracle::random_vector(rng, n * 64);
  World w(5);
  const auto x = solve_many(plan, rhs, 64, w);
  CHECK(plan.checksum() == sum);
  const Eigen::MatrixXd dense = oracle::dense(a);
  for (std::size_t j = 0; j < 64; ++j) {
    const auto fj = std::span<const double>(rhs).subspan(j * n, n);
    const auto xj = std::span<const double>(x).subspan(j * n, n);
    CHECK(oracle::rel_error(xj, oracle::dense_solve(dense, fj)) <= 1e-10);
  }
  World single(5);
  const auto first = dichotomy_solve(plan, std::span<const double>(rhs).first(n), single);
  CHECK(first == std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)));
}

TEST_CASE("batched traffic scales with the batch width") {
  std::mt19937_64 rng(4);
  const std::size_t n = 40;
  const auto a = oracle::random_dominant(rng, n);
  const auto plan = build_plan(a, Partition::balanced(n, 4));
  const auto rhs = oracle::random_vector(rng, n * 8);
  World one(4), eight(4);
  DichotomyTrace t1, t8;
  (void)solve_many(plan, std::span<const double>(rhs).first(n), 1, one, ExecutorKind::Simulator, &t1);
  (void)solve_many(plan, rhs, 8, eight, ExecutorKind::Simulator, &t8);
  REQUIRE(t1.rows.size() == t8.rows.size());
  for (std::size_t i = 0; i < t1.rows.size(); ++i) {
    CHECK(t8.rows[i].level == t1.rows[i].level);
    CHECK(t8.rows[i].scalars_sent == 8 * t1.rows[i].scalars_sent);
  }
  CHECK(one.stats().total().levels == 2);
  CHECK(eight.stats().total().levels == 2);
  CHECK(eight.stats().total().msgs_sent == one.stats().total().msgs_sent);
}

TEST_CASE("linearity") {
  std::mt19937_64 rng(12);
  const std::size_t n = 70;
  const auto a = oracle::random_dominant(rng, n);
  const auto plan = build_plan(a, Partition::balanced(n, 6));
  const auto f1 = oracle::random_vector(rng, n);
  const auto f2 = oracle::random_vector(rng, n);

  std::vector<double> pair(f1);
  for (double v : f1) pair.push_back(2.0 * v);
  World w(6);
  const auto x = solve_many(plan, pair, 2, w);
  for (std::size_t i = 0; i < n; ++i) CHECK(x[n + i] == 2.0 * x[i]);

  const double ca = 0.7;
  const double cb = -1.9;
  std::vector<double> mix(n);
  for (std::size_t i = 0; i < n; ++i) mix[i] = ca * f1[i] + cb * f2[i];
  const auto x1 = dichotomy_solve(plan, f1, w);
  const auto x2 = dichotomy_solve(plan, f2, w);
  const auto xm = dichotomy_solve(plan, mix, w);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(xm[i] - (ca * x1[i] + cb * x2[i])) <= 1e-12);
}

TEST_CASE("executors agree bit for bit") {
  std::mt19937_64 rng(31);
  for (int p : {2, 4, 7, 8, 16}) {
    const std::size_t n = 64 + rng() % 200;
    const auto a = oracle::random_dominant(rng, n);
    const auto plan = build_plan(a, random_partition(rng, n, p));
    const auto f = oracle::random_vector(rng, n * 3);
    World ws(p), wt(p);
    const auto xs = solve_many(plan, f, 3, ws, ExecutorKind::Simulator);
    const auto xt = solve_many(plan, f, 3, wt, ExecutorKind::Threads);
    CHECK(xs == xt);
    CHECK(ws.stats() == wt.stats());
  }
}

TEST_CASE("several systems sharing a partition travel together") {
  std::mt19937_64 rng(55);
  const std::size_t n = 30;
  const int p = 3;
  const auto part = Partition::balanced(n, p);
  const auto a1 = oracle::random_dominant(rng, n);
  const auto a2 = oracle::random_dominant(rng, n);
  const auto plan1 = build_plan(a1, part);
  const auto plan2 = build_plan(a2, part);
  const auto f1 = oracle::random_vector(rng, n);
  const auto f2 = oracle::random_vector(rng, 2 * n);
  std::vector<double> x1(n), x2(2 * n);
  World w(p);
  w.run(ExecutorKind::Simulator, [&](comm::Comm& c) {
    const std::size_t off = part.first(c.rank()) - 1;
    const std::size_t len = part.size(c.rank());
    std::vector<double> r1(f1.begin() + static_cast<std::ptrdiff_t>(off), f1.begin() + static_cast<std::ptrdiff_t>(off + len));
    std::vector<double> r2;
    for (std::size_t j = 0; j < 2; ++j) {
      r2.insert(r2.end(), f2.begin() + static_cast<std::ptrdiff_t>(j * n + off),
                f2.begin() + static_cast<std::ptrdiff_t>(j * n + off + len));
    }
    std::vector<double> s1(len), s2(2 * len);
    const LocalSystem systems[] = {{&plan1, r1, s1, 1}, {&plan2, r2, s2, 2}};
    solve_on_rank(c, systems);
    std::copy(s1.begin(), s1.end(), x1.begin() + static_cast<std::ptrdiff_t>(off));
    for (std::size_t j = 0; j < 2; ++j) {
      std::copy_n(s2.begin() + static_cast<std::ptrdiff_t>(j * len), len, x2.begin() + static_cast<std::ptrdiff_t>(j * n + off));
    }
  });
  CHECK(oracle::rel_error(x1, oracle::dense_solve(a1, f1)) <= 1e-10);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto fj = std::span<const double>(f2).subspan(j * n, n);
    CHECK(oracle::rel_error(std::span<const double>(x2).subspan(j * n, n), oracle::dense_solve(a2, fj)) <= 1e-10);
  }
  CHECK(w.stats().total().msgs_sent > 0);
}

TEST_CASE("mismatched inputs") {
  const auto a = laplace(8);
  const auto plan = build_plan(a, Partition({4, 4}));
  World w3(3);
  CHECK(code_of([&] { (void)dichotomy_solve(plan, std::vector<double>(8, 1.0), w3); }) == Errc::DimensionMismatch);
  World w2(2);
  CHECK(code_of([&] { (void)dichotomy_solve(plan, std::vector<double>(7, 1.0), w2); }) == Errc::DimensionMismatch);
}

TEST_CASE("cost models") {
  CHECK(predict_time_dichotomy(2, 1, 0, 0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(predict_time_cyclic(4, 1, 1, 1, 1) == doctest::Approx(12.0).epsilon(1e-15));
  const double big = 1e9;
  const double ratio = predict_time_dichotomy(16, big, 0, 1, 1) / predict_time_cyclic(16, big, 0, 1, 1);
  CHECK(ratio == doctest::Approx((4.0 - 15.0 / 16.0) / 4.0 * 1.5 / 2.0).epsilon(1e-12));
  CHECK(ratio == doctest::Approx(0.57421875).epsilon(1e-12));
  CHECK(code_of([] { (void)predict_time_dichotomy(1, 1, 1, 1, 1); }) == Errc::DomainError);
  CHECK(code_of([] { (void)predict_time_cyclic(1.5, 1, 1, 1, 1); }) == Errc::DomainError);
  CHECK(code_of([] { (void)predict_time_cyclic(4, 1, -1, 1, 1); }) == Errc::DomainError);
}
