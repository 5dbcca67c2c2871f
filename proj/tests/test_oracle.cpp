#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fdeopt/oracle.hpp"

using namespace fdeopt;

TEST_CASE("dense constraint matches structured closed forms") {
  // n = 1: shared closed form with apply_B
  ProblemSpec spec;
  spec.n = 1;
  const Grid g1(1);
  const Eigen::MatrixXd b1 = oracle::dense_constraint(spec, g1);
  const ConstraintOperator op1(spec, g1);
  CHECK(b1(0, 0) == doctest::Approx(op1.apply(std::vector<double>{1.0})[0]).epsilon(1e-14));

  // n = 2, alpha = 0.5, beta = 1.5: all 64 entries against the FFT path
  spec.n = 2;
  spec.alpha = 0.5;
  spec.beta1 = 1.5;
  spec.beta2 = 1.5;
  const Grid g2(2);
  const Eigen::MatrixXd b2 = oracle::dense_constraint(spec, g2);
  const ConstraintOperator op2(spec, g2);
  const double scale = b2.cwiseAbs().maxCoeff();
  for (int j = 0; j < 8; ++j) {
    std::vector<double> e(8, 0.0);
    e[j] = 1.0;
    const auto col = op2.apply(e);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(col[i] - b2(i, j)) / scale < 1e-13);
  }

  CHECK_THROWS_AS(oracle::dense_constraint(ProblemSpec{.n = 7}, Grid(7)), std::invalid_argument);
}

TEST_CASE("dense constraint is 3-level toeplitz") {
  ProblemSpec spec;
  spec.n = 2;
  const Eigen::MatrixXd b = oracle::dense_constraint(spec, Grid(2));
  const int n = 2;
  auto unpack = [&](int r) {
    return std::array<int, 3>{r / (n * n), (r / n) % n, r % n};
  };
  for (int r1 = 0; r1 < 8; ++r1)
    for (int c1 = 0; c1 < 8; ++c1)
      for (int r2 = 0; r2 < 8; ++r2)
        for (int c2 = 0; c2 < 8; ++c2) {
          const auto a = unpack(r1), bidx = unpack(c1), c = unpack(r2), d = unpack(c2);
          bool same_offset = true;
          for (int l = 0; l < 3; ++l) same_offset = same_offset && (a[l] - bidx[l] == c[l] - d[l]);
          if (same_offset) CHECK(b(r1, c1) == doctest::Approx(b(r2, c2)).epsilon(1e-15));
        }
}

TEST_CASE("dense admm step: decoupled diagonal case at rho = 1") {
  // with B = 0 and rho = 1 the y block solves a diagonal system in closed form
  const int N = 6;
  oracle::DenseProblem dp;
  dp.B = Eigen::MatrixXd::Zero(N, N);
  dp.diag_j1 = Eigen::VectorXd::LinSpaced(N, 0.5, 1.0);
  dp.diag_j2 = Eigen::VectorXd::Constant(N, 0.25);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  dp.ybar = Eigen::VectorXd::NullaryExpr(N, [&](Eigen::Index) { return gauss(rng); });
  dp.g = Eigen::VectorXd::Zero(N);
  dp.psi = 1.0;
  dp.gamma = 1e-4;
  dp.delta = 0.8;
  dp.rho = 1.0;
  dp.y_lo = -kUnbounded;
  dp.y_hi = kUnbounded;
  dp.v_lo = -kUnbounded;
  dp.v_hi = kUnbounded;

  oracle::DenseState s = oracle::dense_zero_state(N);
  s.w_y = Eigen::VectorXd::NullaryExpr(N, [&](Eigen::Index) { return gauss(rng); });
  s.z_y = Eigen::VectorXd::NullaryExpr(N, [&](Eigen::Index) { return gauss(rng); });
  const Eigen::VectorXd want =
      (dp.diag_j1.asDiagonal() * dp.ybar - s.w_y + s.z_y / dp.delta).array() /
      (dp.diag_j1.array() + 1.0 / dp.delta);
  oracle::dense_admm_step(dp, s);
  for (int i = 0; i < N; ++i) CHECK(s.y(i) == doctest::Approx(want(i)).epsilon(1e-12));
}

TEST_CASE("dense admm step is deterministic") {
  ProblemSpec spec;
  spec.n = 2;
  AdmmConfig cfg;
  cfg.delta = 0.4;
  const auto dp = oracle::make_dense_problem(spec, cfg);
  auto a = oracle::dense_zero_state(dp.size());
  auto b = oracle::dense_zero_state(dp.size());
  for (int i = 0; i < 2; ++i) {
    oracle::dense_admm_step(dp, a);
    oracle::dense_admm_step(dp, b);
  }
  CHECK(a.y == b.y);
  CHECK(a.v == b.v);
  CHECK(a.p == b.p);
  CHECK(a.w_y == b.w_y);
}

TEST_CASE("kkt residual") {
  ProblemSpec spec;
  spec.n = 3;
  AdmmConfig cfg;
  const auto dp = oracle::make_dense_problem(spec, cfg);
  const std::size_t N = dp.size();

  // exact equality-constrained solve: all residuals at solver precision
  oracle::DenseState s = oracle::dense_zero_state(N);
  oracle::dense_kkt_solve(dp, s.y, s.v, s.p);
  s.z_y = s.y;
  s.z_v = s.v;
  const auto r = oracle::kkt_residual(dp, s);
  CHECK(r.max_stationarity() < 1e-10);
  CHECK(r.primal < 1e-10);
  CHECK(r.bound_violation == 0.0);
  CHECK(r.complementarity < 1e-10);

  // random infeasible point: primal residual equals direct recomputation
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  oracle::DenseState bad = oracle::dense_zero_state(N);
  bad.y = Eigen::VectorXd::NullaryExpr(N, [&](Eigen::Index) { return gauss(rng); });
  bad.v = Eigen::VectorXd::NullaryExpr(N, [&](Eigen::Index) { return gauss(rng); });
  const auto rb = oracle::kkt_residual(dp, bad);
  CHECK(rb.primal ==
        doctest::Approx((dp.B * bad.y + bad.v).lpNorm<Eigen::Infinity>()).epsilon(1e-14));
}

TEST_CASE("converged admm run passes the kkt audit") {
  ProblemSpec spec;
  spec.n = 4;
  spec.y_lo = -4;
  spec.y_hi = 4;
  spec.u_lo = -350;
  spec.u_hi = 350;
  AdmmConfig cfg;
  cfg.delta = 2.0;
  const auto res = solve(spec, cfg);
  REQUIRE(res.status == SolveStatus::converged);
  const auto dp = oracle::make_dense_problem(spec, cfg);
  oracle::DenseState s = oracle::dense_zero_state(dp.size());
  auto map = [](const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  };
  s.y = map(res.y);
  s.v = dp.psi * map(res.u);
  s.z_y = map(res.z_y);
  s.z_v = map(res.z_v);
  s.p = map(res.p);
  s.w_y = map(res.w_y);
  s.w_v = map(res.w_v);
  const auto r = oracle::kkt_residual(dp, s);
  const double scale = std::max(1.0, map(res.y).lpNorm<Eigen::Infinity>());
  CHECK(r.max_stationarity() <= 1e-2 * scale);
  CHECK(r.primal <= cfg.tol_primal);
  CHECK(r.bound_violation == 0.0);
}

TEST_CASE("validation suite passes on a correct build") {
  for (const auto& check : oracle::run_validation(4)) {
    INFO(check.name, " max_err=", check.max_err, " threshold=", check.threshold);
    CHECK(check.pass());
  }
}

TEST_CASE("validation suite executes degenerate 1x1 checks") {
  for (const auto& check : oracle::run_validation(1)) {
    INFO(check.name);
    CHECK(check.pass());
  }
}

TEST_CASE("fault injection trips the matvec equivalence") {
  const auto results = oracle::run_validation(2, 1e-6);
  bool found = false;
  for (const auto& check : results)
    if (check.name == "matvec_unit_basis") {
      found = true;
      CHECK_FALSE(check.pass());
    }
  CHECK(found);
}
