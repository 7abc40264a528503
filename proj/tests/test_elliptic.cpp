#include <Eigen/Sparse>
#include <cmath>
#include <numbers>
#include <random>

#include "axisolve/elliptic.hpp"
#include "axisolve/error.hpp"
#include "axisolve/kernels.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace axisolve;
using std::numbers::pi;

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

const CoefficientFields kUnit{[](double, double) { return 1.0; }, nullptr};

std::vector<double> apply_A_serial_copy(const DiscreteOperator& op, std::span<const double> y) {
  std::vector<double> out(y.size());
  apply_A_serial(op, y, out);
  return out;
}

// Column-by-column assembly of apply_A.
Eigen::SparseMatrix<double> sparse_of(const DiscreteOperator& op) {
  const std::size_t n = op.grid.unknowns();
  std::vector<Eigen::Triplet<double>> t;
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const auto col = apply_A_serial_copy(op, e);
    for (std::size_t i = 0; i < n; ++i) {
      if (col[i] != 0.0) t.emplace_back(static_cast<int>(i), static_cast<int>(j), col[i]);
    }
    e[j] = 0.0;
  }
  Eigen::SparseMatrix<double> m(static_cast<int>(n), static_cast<int>(n));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

std::vector<double> sparse_spd_solve(const DiscreteOperator& op) {
  const Eigen::SparseMatrix<double> l = -sparse_of(op);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(l);
  REQUIRE(ldlt.info() == Eigen::Success);
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(op.phi.data(), static_cast<Eigen::Index>(op.phi.size()));
  const Eigen::VectorXd x = ldlt.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

double manufactured_error(std::size_t n, const Field& exact, const CoefficientFields& fields) {
  const Grid2D grid(n, n, 1.0, 1.0);
  const auto mp = manufactured_problem(grid, exact, fields);
  const auto x = sparse_spd_solve(mp.op);
  std::vector<double> e(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) e[i] = x[i] - mp.exact[i];
  return grid_l2(grid, e);
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid2D g(5, 4, 9.0, 7.0);
  CHECK(g.h1() == 2.0);
  CHECK(g.h2() == 2.0);
  CHECK(g.r(1) == 1.0);
  CHECK(g.r(5) == 9.0);
  CHECK(g.z(4) == 7.0);
  CHECK(g.line() == 4);
  CHECK(g.unknowns() == 16);
  CHECK(g.index(1, 1) == 0);
  CHECK(g.index(4, 1) == 3);
  CHECK(g.index(1, 2) == 4);
  CHECK(code_of([] { Grid2D(1, 4, 1, 1); }) == Errc::DomainError);
  CHECK(code_of([] { Grid2D(4, 4, 0, 1); }) == Errc::DomainError);
}

TEST_CASE("assembly samples at the staggered points") {
  const Grid2D g(6, 5, 2.75, 2.25);
  const auto op = assemble(g, kUnit, nullptr);
  for (std::size_t k = 1; k <= 5; ++k) {
    for (std::size_t i = 1; i <= 5; ++i) {
      const auto idx = g.index(i, k);
      CHECK(op.a1[idx] == doctest::Approx(g.r(i) + 0.5 * g.h1()));
      CHECK(op.a2[idx] == (k < 5 ? g.r(i) : 0.0));
      CHECK(op.w[idx] == 0.0);
      CHECK(op.phi[idx] == 0.0);
    }
  }
  CHECK(op.bounds.s1 == 1.0);
  CHECK(op.bounds.s2 == 1.0);
  CHECK(op.bounds.d2 == 0.0);

  const Grid2D small(2, 2, 1.5, 1.5);
  const auto op2 = assemble(small, {[](double, double) { return 1.0; }, [](double, double) { return 1.0; }}, nullptr);
  CHECK(small.r(1) == 0.5);
  CHECK(small.r(2) == 1.5);
  CHECK(op2.w[small.index(1, 1)] == 0.5);

  const auto op3 = assemble(g, {[](double, double z) { return 1.0 + z; }, nullptr}, [](double, double) { return 2.0; });
  for (std::size_t i = 1; i <= 5; ++i) {
    CHECK(op3.a2[g.index(i, 1)] == doctest::Approx(g.r(i) * (1.0 + g.z(1) + 0.5 * g.h2())).epsilon(1e-15));
    CHECK(op3.phi[g.index(i, 3)] == doctest::Approx(2.0 * g.r(i)));
  }

  CHECK(code_of([&] { (void)assemble(g, {[](double r, double) { return r < 1 ? 1.0 : 0.0; }, nullptr}, nullptr); }) ==
        Errc::NonPositiveCoefficient);
  CHECK(code_of([&] { (void)assemble(g, {[](double, double) { return 1.0; }, [](double, double) { return -1.0; }}, nullptr); }) ==
        Errc::NonPositiveCoefficient);
}

TEST_CASE("stencil bookkeeping") {
  const Grid2D g(7, 6, 1.0, 2.0);
  const auto op = assemble(g, kUnit, nullptr);
  CHECK(apply_A(op, std::vector<double>(g.unknowns(), 0.0)) == std::vector<double>(g.unknowns(), 0.0));
  const auto out = apply_A(op, std::vector<double>(g.unknowns(), 1.0));
  const double ih = 1.0 / (g.h1() * g.h1());
  for (std::size_t k = 1; k <= 6; ++k) {
    for (std::size_t i = 1; i <= 6; ++i) {
      const double expect = i == 6 ? -op.a1[g.index(6, k)] * ih : 0.0;
      CHECK(out[g.index(i, k)] == doctest::Approx(expect).epsilon(1e-14));
    }
  }
  CHECK(code_of([&] { (void)apply_A(op, std::vector<double>(3)); }) == Errc::DimensionMismatch);
}

TEST_CASE("symmetric and negative definite") {
  const Grid2D g(9, 9, 1.3, 0.8);
  const CoefficientFields fields{[](double r, double z) { return 1.5 + std::sin(3 * r) * std::cos(2 * z); },
                                 [](double r, double) { return 0.2 * r; }};
  const auto op = assemble(g, fields, nullptr);
  const Eigen::MatrixXd a = Eigen::MatrixXd(sparse_of(op));
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
  CHECK(es.eigenvalues().maxCoeff() < 0.0);

  std::mt19937_64 rng(3);
  for (int t = 0; t < 5; ++t) {
    const auto u = oracle::random_vector(rng, g.unknowns());
    const auto v = oracle::random_vector(rng, g.unknowns());
    const auto au = apply_A(op, u);
    const auto av = apply_A(op, v);
    double lhs = 0, rhs = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      lhs += au[i] * v[i];
      rhs += u[i] * av[i];
      nu += u[i] * u[i];
      nv += v[i] * v[i];
    }
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::sqrt(nu * nv) * a.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("parallel and serial kernels agree bit for bit") {
  const Grid2D g(65, 40, 1.0, 1.0);
  const auto op = assemble(g, {[](double r, double z) { return 1 + r * z; }, [](double, double) { return 0.3; }}, nullptr);
  std::mt19937_64 rng(9);
  const auto y = oracle::random_vector(rng, g.unknowns());
  std::vector<double> a(y.size()), b(y.size()), c(y.size());
  {
    kernels::ScopedMode m(kernels::Mode::OpenMP);
    apply_A(op, y, a);
    apply_spd(op, y, c);
  }
  apply_A_serial(op, y, b);
  CHECK(a == b);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(c[i] == -a[i]);
}

TEST_CASE("slab operator matches the global operator") {
  const Grid2D g(14, 7, 1.0, 1.0);
  const auto op = assemble(g, {[](double r, double z) { return 2 + std::cos(r + z); }, [](double, double) { return 0.1; }},
                           [](double r, double) { return r; });
  std::mt19937_64 rng(21);
  const auto y = oracle::random_vector(rng, g.unknowns());
  std::vector<double> ref(y.size());
  apply_spd(op, y, ref);
  for (int p : {1, 2, 3, 6}) {
    const auto part = Partition::balanced(g.line(), p);
    std::vector<double> out(y.size()), phi(y.size());
    comm::World w(p);
    w.run(comm::ExecutorKind::Simulator, [&](comm::Comm& c) {
      const SlabOperator slab(op, part, c.rank());
      std::vector<double> yl(slab.local_size()), ol(slab.local_size());
      slab.scatter(y, yl);
      slab.apply_spd(c, yl, ol, 0);
      slab.gather(ol, out);
      slab.gather(slab.phi(), phi);
    });
    CHECK(out == ref);
    CHECK(phi == op.phi);
    if (p > 1) CHECK(w.stats().total().scalars_sent == 2 * static_cast<std::uint64_t>(p - 1) * g.n2());
  }
}

TEST_CASE("manufactured right-hand sides against closed forms") {
  const double l1 = 2.0;
  const double l2 = 3.0;
  const Grid2D g(12, 10, l1, l2);
  const Field u1 = [&](double r, double z) { return std::cos(pi * z / l2) * (l1 * l1 - r * r); };
  const auto mp1 = manufactured_problem(g, u1, kUnit);
  for (std::size_t k = 1; k <= g.n2(); ++k) {
    for (std::size_t i = 1; i <= g.line(); ++i) {
      const double r = g.r(i);
      const double z = g.z(k);
      const double f = std::cos(pi * z / l2) * (4.0 + (pi / l2) * (pi / l2) * (l1 * l1 - r * r));
      CHECK(mp1.op.phi[g.index(i, k)] == doctest::Approx(r * f).epsilon(1e-8));
      CHECK(mp1.exact[g.index(i, k)] == u1(r, z));
    }
  }

  const CoefficientFields wavy{[&](double r, double) { return 1.0 + 0.5 * std::sin(pi * r / l1); }, nullptr};
  const auto mp2 = manufactured_problem(g, [&](double r, double) { return l1 * l1 - r * r; }, wavy);
  for (std::size_t i = 1; i <= g.line(); ++i) {
    const double r = g.r(i);
    const double kap = 1.0 + 0.5 * std::sin(pi * r / l1);
    const double dkap = 0.5 * (pi / l1) * std::cos(pi * r / l1);
    CHECK(mp2.op.phi[g.index(i, 4)] == doctest::Approx(r * (4.0 * kap + 2.0 * r * dkap)).epsilon(1e-8));
  }

  const auto zero = manufactured_problem(g, [](double, double) { return 0.0; }, kUnit);
  CHECK(zero.op.phi == std::vector<double>(g.unknowns(), 0.0));
  CHECK(sparse_spd_solve(zero.op) == std::vector<double>(g.unknowns(), 0.0));

  CHECK(code_of([&] { (void)manufactured_problem(g, [&](double r, double z) { return std::sin(pi * z / l2) * (l1 * l1 - r * r); }, kUnit); }) ==
        Errc::BoundaryViolation);
  CHECK(code_of([&] { (void)manufactured_problem(g, [&](double, double z) { return std::cos(pi * z / l2); }, kUnit); }) ==
        Errc::BoundaryViolation);
}

TEST_CASE("second-order convergence for a profile flat at both z-ends") {
  const CoefficientFields fields{[](double r, double z) { return 1.0 + 0.5 * std::sin(pi * r) * std::cos(pi * z); },
                                 [](double, double) { return 0.5; }};
  const Field exact = [](double r, double z) {
    return (std::cos(pi * z) + 0.25 * std::cos(2 * pi * z)) * (1.0 - r * r);
  };
  const double e16 = manufactured_error(16, exact, fields);
  const double e32 = manufactured_error(32, exact, fields);
  const double e64 = manufactured_error(64, exact, fields);
  CHECK(e16 / e32 >= 3.5);
  CHECK(e16 / e32 <= 5.5);
  CHECK(e32 / e64 >= 3.5);
  CHECK(e32 / e64 <= 5.5);
}

TEST_CASE("cos(pi z / l2) converges at first order through the z = l2 closure") {
  const Field exact = [](double r, double z) { return std::cos(pi * z) * (1.0 - r * r); };
  const double e16 = manufactured_error(16, exact, kUnit);
  const double e32 = manufactured_error(32, exact, kUnit);
  const double e64 = manufactured_error(64, exact, kUnit);
  CHECK(e16 / e32 == doctest::Approx(2.0).epsilon(0.1));
  CHECK(e32 / e64 == doctest::Approx(2.0).epsilon(0.1));
}
