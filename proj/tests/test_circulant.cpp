#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fdeopt/circulant.hpp"
#include "fdeopt/oracle.hpp"

using namespace fdeopt;
using fft::Complex;

namespace {

std::vector<double> randn(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> gauss;
  std::vector<double> v(n);
  for (auto& x : v) x = gauss(rng);
  return v;
}

}  // namespace

TEST_CASE("tchan closed form") {
  ToeplitzSpec1D id;
  id.col = {1, 0, 0, 0};
  id.row = {1, 0, 0, 0};
  const auto c = tchan(id);
  CHECK(c.first_col == std::vector<double>{1, 0, 0, 0});
  for (const auto& e : c.eigs) CHECK(std::abs(e - Complex(1.0)) < 1e-14);

  // Caputo (0.5, 3, h=1): (1, -1/3, -1/24)
  const auto cap = tchan(build_caputo(0.5, 3, 1.0));
  CHECK(cap.first_col[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cap.first_col[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(cap.first_col[2] == doctest::Approx(-0.125 / 3.0).epsilon(1e-14));

  std::mt19937_64 rng(2);
  ToeplitzSpec1D two;
  two.col = randn(rng, 2);
  two.row = {two.col[0], 1.7};
  const auto c2 = tchan(two);
  CHECK(c2.first_col[0] == two.col[0]);
  CHECK(c2.first_col[1] == doctest::Approx((two.col[1] + two.row[1]) / 2.0).epsilon(1e-15));
}

TEST_CASE("tchan is the frobenius-nearest circulant") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> size_dist(1, 8);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = size_dist(rng);
    ToeplitzSpec1D spec;
    spec.col = randn(rng, n);
    spec.row = randn(rng, n);
    spec.row[0] = spec.col[0];
    const Eigen::MatrixXd T = oracle::dense_toeplitz(spec);
    const auto c = tchan(spec);
    const double best = (oracle::dense_circulant(c.first_col) - T).norm();
    for (int trial = 0; trial < 200; ++trial) {
      const auto cand = randn(rng, n);
      CHECK(best <= (oracle::dense_circulant(cand) - T).norm() + 1e-12);
    }
    // diagonal-averaging construction, exactly
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int r = 0; r < n; ++r) acc += T((r + i) % n, r);
      CHECK(c.first_col[i] == doctest::Approx(acc / n).epsilon(1e-13));
    }
  }
}

TEST_CASE("circulant eigenvalues") {
  const auto e1 = circulant_eigs(std::vector<double>{1, 0, 0, 0});
  for (const auto& v : e1) CHECK(std::abs(v - Complex(1.0)) < 1e-14);

  const auto shift = circulant_eigs(std::vector<double>{0, 1, 0, 0});
  CHECK(std::abs(shift[0] - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(shift[1] - Complex(0, -1)) < 1e-14);
  CHECK(std::abs(shift[2] - Complex(-1, 0)) < 1e-14);
  CHECK(std::abs(shift[3] - Complex(0, 1)) < 1e-14);

  const double a = -0.37;
  const auto ones = circulant_eigs(std::vector<double>{a, a, a, a});
  CHECK(std::abs(ones[0] - Complex(4 * a, 0)) < 1e-14);
  for (int j = 1; j < 4; ++j) CHECK(std::abs(ones[j]) < 1e-14);

  CHECK_THROWS_AS(circulant_eigs(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("eigen-identity against dense fourier vectors") {
  std::mt19937_64 rng(29);
  for (int n : {2, 5, 8, 32}) {
    const auto col = randn(rng, n);
    const auto eigs = circulant_eigs(col);
    const Eigen::MatrixXd C = oracle::dense_circulant(col);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXcd xj(n);
      for (int k = 0; k < n; ++k)
        xj(k) = std::polar(1.0, 2.0 * std::numbers::pi * j * k / n);
      const double scale = std::max(1.0, std::abs(eigs[j]));
      CHECK((C * xj - eigs[j] * xj).lpNorm<Eigen::Infinity>() / scale < 1e-12);
    }
  }
}

TEST_CASE("preconditioner assembly") {
  // n = 1: the T. Chan approximation of a 1x1 matrix is the matrix itself
  ProblemSpec spec;
  spec.n = 1;
  const ConstraintOperator op1(spec, Grid(1));
  const auto pc1 = assemble_precond(op1, 1.618, 2.0, spec.gamma);
  const auto b11 = op1.apply(std::vector<double>{1.0});
  CHECK(pc1.lam_b()[0].real() == doctest::Approx(b11[0]).epsilon(1e-14));
  CHECK(std::abs(pc1.lam_b()[0].imag()) < 1e-14);

  // zero operator eigenvalues: lam_S is the constant rho(1 + 1/delta)
  const double rho = 1.3, delta = 0.7;
  CirculantPreconditioner zero(std::vector<Complex>(8, 0.0), rho, delta, 1e-4, 1.0, 2);
  for (double v : zero.lam_s()) CHECK(v == doctest::Approx(rho * (1 + 1 / delta)).epsilon(1e-15));

  // n = 2: lam_S matches the dense eigensolver on the assembled S~ as multisets
  spec.n = 2;
  const ConstraintOperator op2(spec, Grid(2));
  const auto pc2 = assemble_precond(op2, 1.618, 2.0, spec.gamma);
  const Eigen::MatrixXd st = oracle::dense_precond(op2, pc2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st);
  std::vector<double> want(es.eigenvalues().data(), es.eigenvalues().data() + st.rows());
  std::vector<double> got = pc2.lam_s();
  std::sort(want.begin(), want.end());
  std::sort(got.begin(), got.end());
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));

  // every lam_S is real positive and at least rho/delta
  for (double v : pc2.lam_s()) CHECK(v >= pc2.rho() / pc2.delta());
}

TEST_CASE("preconditioner solve") {
  // rho (1 + 1/delta) = 1 with zero eigenvalues: identity solve
  CirculantPreconditioner ident(std::vector<Complex>(27, 0.0), 0.5, 1.0, 1e-4, 1.0, 3);
  std::mt19937_64 rng(31);
  const auto r = randn(rng, 27);
  const auto z = ident.solve(r);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(z[i] == doctest::Approx(r[i]).epsilon(1e-13));

  // constant lam_S = c: solve divides by c
  CirculantPreconditioner half(std::vector<Complex>(27, 0.0), 1.0, 1.0, 1e-4, 1.0, 3);
  const auto z2 = half.solve(r);
  for (std::size_t i = 0; i < r.size(); ++i)
    CHECK(z2[i] == doctest::Approx(r[i] / 2.0).epsilon(1e-13));

  // random n = 3 against the dense solve
  ProblemSpec spec;
  spec.n = 3;
  const ConstraintOperator op(spec, Grid(3));
  const auto pc = assemble_precond(op, 1.618, 0.4, spec.gamma);
  const Eigen::MatrixXd st = oracle::dense_precond(op, pc);
  const auto rr = randn(rng, op.size());
  const auto zz = pc.solve(rr);
  const Eigen::VectorXd want =
      st.ldlt().solve(Eigen::Map<const Eigen::VectorXd>(rr.data(), st.rows()));
  for (std::size_t i = 0; i < zz.size(); ++i)
    CHECK(zz[i] == doctest::Approx(want(static_cast<Eigen::Index>(i))).epsilon(1e-10));

  // self-adjoint positive operation
  const auto r1 = randn(rng, op.size()), r2 = randn(rng, op.size());
  const auto z_1 = pc.solve(r1), z_2 = pc.solve(r2);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < r1.size(); ++i) {
    a += z_1[i] * r2[i];
    b += r1[i] * z_2[i];
  }
  CHECK(a == doctest::Approx(b).epsilon(1e-10));

  CHECK_THROWS_AS(pc.solve(std::vector<double>(5)), std::invalid_argument);
}

TEST_CASE("generating symbol diagnostics") {
  ProblemSpec spec;
  const Grid grid(8);
  const auto scals = scaling(spec, grid);

  // spatial part at theta = 0 shrinks with the truncation length
  // (partial sums of the space coefficients tend to zero from below)
  auto spatial_at_zero = [&](int K) {
    ScalingConstants time_off = scals;
    time_off.nu3 = 0.0;
    return std::abs(symbol_eval({0.0, 0.0, 0.0}, time_off, spec.alpha, spec.beta1, spec.beta2, K));
  };
  const double s10 = spatial_at_zero(10), s100 = spatial_at_zero(100),
               s1000 = spatial_at_zero(1000);
  CHECK(s100 < s10);
  CHECK(s1000 < s100);

  // pure time part at theta3 = 0: positive and below nu3
  ScalingConstants space_off = scals;
  space_off.nu1 = 0.0;
  space_off.nu2 = 0.0;
  for (int K : {4, 64, 4096}) {
    const auto phi = symbol_eval({0.0, 0.0, 0.0}, space_off, spec.alpha, spec.beta1, spec.beta2, K);
    CHECK(std::abs(phi.imag()) < 1e-14);
    CHECK(phi.real() > 0.0);
    CHECK(phi.real() < scals.nu3);
  }

  // symbol values are conjugate-symmetric in theta (real coefficients)
  const std::array<double, 3> theta{0.9, -1.7, 2.3};
  const std::array<double, 3> neg{-0.9, 1.7, -2.3};
  const auto a = symbol_eval(theta, scals, spec.alpha, spec.beta1, spec.beta2, 64);
  const auto b = symbol_eval(neg, scals, spec.alpha, spec.beta1, spec.beta2, 64);
  CHECK(std::abs(a - std::conj(b)) < 1e-12);
}

TEST_CASE("wiener bound dominates the truncated coefficient sums") {
  for (double alpha = 0.1; alpha < 0.95; alpha += 0.2) {
    for (double beta = 1.05; beta < 1.95; beta += 0.1) {
      ProblemSpec spec;
      spec.alpha = alpha;
      spec.beta1 = beta;
      spec.beta2 = std::min(1.9, beta + 0.05);
      const Grid grid(8);
      const auto scals = scaling(spec, grid);
      const double sum = symbol_coeff_abs_sum(scals, alpha, spec.beta1, spec.beta2, 2000);
      CHECK(sum <= wiener_bound(scals, spec.beta1, spec.beta2));
    }
  }
}

TEST_CASE("clustering report") {
  // n = 1: a single positive eigenvalue
  ProblemSpec spec;
  spec.n = 1;
  const ConstraintOperator op1(spec, Grid(1));
  const auto pc1 = assemble_precond(op1, 1.618, 2.0, spec.gamma);
  const auto rep1 = clustering_report(op1, pc1);
  CHECK(rep1.eigs.size() == 1);
  CHECK(rep1.min_eig > 0.0);

  // zero-operator limit: eigenvalues take exactly the two diagonal ratios
  const double delta = 0.4;
  const auto zero_op = ConstraintOperator::zero(2);
  const auto pc0 = assemble_precond(zero_op, 1.618, delta, 1e-4);
  const auto rep0 = clustering_report(zero_op, pc0);
  const double lo = (0.5 + 1.0 / delta) / (1.0 + 1.0 / delta);
  std::size_t n_lo = 0, n_hi = 0;
  for (double e : rep0.eigs) {
    if (std::abs(e - lo) < 1e-12) ++n_lo;
    if (std::abs(e - 1.0) < 1e-12) ++n_hi;
  }
  CHECK(n_lo == 4);   // the half-weight final time block
  CHECK(n_hi == 4);
  CHECK(rep0.fraction_within(0.3) == doctest::Approx(1.0));

  // table-parameter diagnostic at n = 4: positivity of all eigenvalues
  spec.n = 4;
  const ConstraintOperator op4(spec, Grid(4));
  const auto pc4 = assemble_precond(op4, 1.618, 0.4, spec.gamma);
  const auto rep4 = clustering_report(op4, pc4);
  CHECK(rep4.eigs.size() == 64);
  CHECK(rep4.min_eig > 0.0);
  CHECK(rep4.fraction_within(0.1) <= 1.0);

  // refuses sizes that would require large dense eigendecompositions
  spec.n = 8;
  const ConstraintOperator op8(spec, Grid(8));
  const auto pc8 = assemble_precond(op8, 1.618, 0.4, spec.gamma);
  CHECK_THROWS_AS(clustering_report(op8, pc8), std::invalid_argument);
}
