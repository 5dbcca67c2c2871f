#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fdeopt/problem.hpp"

using namespace fdeopt;

namespace {

// Independent oracle for the fractional binomial coefficients:
// g_k = Gamma(k - c) / (Gamma(-c) Gamma(k + 1)), evaluated through lgamma
// with explicit sign tracking on the negative axis.
double gamma_formula(double c, int k) {
  auto sign_gamma = [](double x) {
    if (x > 0.0) return 1.0;
    const long fl = static_cast<long>(std::floor(x));
    return (fl % 2 == 0) ? 1.0 : -1.0;
  };
  const double num = std::lgamma(k - c);
  const double den = std::lgamma(-c) + std::lgamma(k + 1.0);
  const double sign = sign_gamma(k - c) * sign_gamma(-c);
  return sign * std::exp(num - den);
}

}  // namespace

TEST_CASE("frac_coeffs matches the stated examples") {
  const auto a = frac_coeffs(0.7, 3);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == doctest::Approx(-0.7).epsilon(1e-14));
  CHECK(a[2] == doctest::Approx(-0.105).epsilon(1e-14));
  const auto b = frac_coeffs(1.3, 3);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == doctest::Approx(-1.3).epsilon(1e-14));
  CHECK(b[2] == doctest::Approx(0.195).epsilon(1e-14));
  CHECK(frac_coeffs(0.42, 1) == std::vector<double>{1.0});
}

TEST_CASE("frac_coeffs agrees with the gamma-function oracle") {
  for (const double c : {0.1, 0.3, 0.7, 0.95, 1.05, 1.3, 1.5, 1.9}) {
    const auto g = frac_coeffs(c, 51);
    for (int k = 0; k <= 50; ++k) {
      const double want = gamma_formula(c, k);
      CHECK(g[k] == doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("frac_coeffs rejects out-of-range orders") {
  CHECK_THROWS_AS(frac_coeffs(1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(frac_coeffs(2.5, 4), std::invalid_argument);
  CHECK_THROWS_AS(frac_coeffs(-0.3, 4), std::invalid_argument);
  CHECK_THROWS_AS(frac_coeffs(0.5, 0), std::invalid_argument);
}

TEST_CASE("coefficient signs and partial sums (time order)") {
  for (double alpha = 0.1; alpha < 0.95; alpha += 0.1) {
    const auto g = frac_coeffs(alpha, 10001);
    CHECK(g[0] > 0.0);
    double partial = g[0];
    bool signs_ok = true, sums_ok = true;
    for (int k = 1; k <= 10000; ++k) {
      signs_ok = signs_ok && g[k] < 0.0;
      partial += g[k];
      sums_ok = sums_ok && partial > 0.0;
    }
    CHECK(signs_ok);
    CHECK(sums_ok);
  }
}

TEST_CASE("coefficient signs and partial sums (space order)") {
  for (double beta = 1.1; beta < 1.95; beta += 0.1) {
    const auto g = frac_coeffs(beta, 10001);
    CHECK(g[0] == 1.0);
    CHECK(g[1] == doctest::Approx(-beta).epsilon(1e-14));
    double partial = g[0] + g[1];
    CHECK(partial < 0.0);
    bool signs_ok = true, decreasing_ok = true, sums_ok = true;
    for (int k = 2; k <= 10000; ++k) {
      signs_ok = signs_ok && g[k] > 0.0;
      if (k > 2) decreasing_ok = decreasing_ok && g[k] < g[k - 1];
      partial += g[k];
      sums_ok = sums_ok && partial < 0.0;
    }
    CHECK(signs_ok);
    CHECK(decreasing_ok);
    CHECK(sums_ok);
  }
}

TEST_CASE("problem spec validation") {
  ProblemSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.alpha = 1.2;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = {};
  spec.beta2 = 2.5;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = {};
  spec.gamma = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = {};
  spec.n = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = {};
  spec.y_lo = 2.0;
  spec.y_hi = -2.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("grid geometry and layout") {
  const Grid grid(8);
  CHECK(grid.h == 1.0 / 9.0);
  CHECK(grid.size() == 512);
  CHECK(grid.index(0, 0, 0) == 0);
  CHECK(grid.index(0, 0, 1) == 1);   // x2 innermost
  CHECK(grid.index(0, 1, 0) == 8);   // then x1
  CHECK(grid.index(1, 0, 0) == 64);  // time outermost
  CHECK(grid.coord(0) == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("scaling constants: reference evaluations") {
  const Grid grid(8);
  ProblemSpec spec;  // alpha 0.7, beta 1.3
  const auto s = scaling(spec, grid);
  CHECK(s.psi == doctest::Approx(std::pow(9.0, -1.3)).epsilon(1e-15));
  CHECK(s.psi == doctest::Approx(0.057455).epsilon(1e-3));
  CHECK(s.nu1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.nu2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.nu3 == doctest::Approx(std::pow(9.0, -0.6)).epsilon(1e-15));
  CHECK(s.nu3 == doctest::Approx(0.26762).epsilon(1e-3));

  spec.alpha = 0.9;
  spec.beta1 = 1.1;
  spec.beta2 = 1.9;
  const auto s2 = scaling(spec, grid);
  CHECK(s2.psi == doctest::Approx(std::pow(9.0, -1.9)).epsilon(1e-15));
  CHECK(s2.nu2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s2.nu1 == doctest::Approx(std::pow(9.0, -0.8)).epsilon(1e-14));
  CHECK(s2.nu3 == doctest::Approx(std::pow(9.0, -1.0)).epsilon(1e-14));
}

TEST_CASE("scaling invariants over random parameters") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ua(0.05, 0.95), ub(1.05, 1.95);
  std::uniform_int_distribution<int> un(1, 40);
  for (int rep = 0; rep < 200; ++rep) {
    ProblemSpec spec;
    spec.alpha = ua(rng);
    spec.beta1 = ub(rng);
    spec.beta2 = ub(rng);
    spec.n = un(rng);
    const Grid grid(spec.n);
    const auto s = scaling(spec, grid);
    CHECK(s.psi <= std::pow(grid.h, spec.alpha) * (1 + 1e-15));
    CHECK(s.psi <= std::pow(grid.h, spec.beta1) * (1 + 1e-15));
    CHECK(s.psi <= std::pow(grid.h, spec.beta2) * (1 + 1e-15));
    CHECK(std::max({s.nu1, s.nu2, s.nu3}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.psi > 0.0);
  }
}

TEST_CASE("desired state function") {
  CHECK(desired_state_at(0.0, 0.77, 0.3) == 0.0);
  CHECK(desired_state_at(0.4, 0.9, 0.0) == 0.0);
  const double v = desired_state_at(0.5, 0.5, 0.5);
  CHECK(v == doctest::Approx(10.0 * std::cos(5.0) * std::sin(0.25) * (1.0 - std::exp(-2.5)))
                 .epsilon(1e-15));
  CHECK(v == doctest::Approx(0.64412).epsilon(5e-4));

  const Grid grid(3);  // h = 1/4, node index 1 sits at 0.5
  const auto ybar = desired_state(grid);
  CHECK(ybar[grid.index(1, 1, 1)] == doctest::Approx(v).epsilon(1e-15));
}

TEST_CASE("objective weights") {
  const auto w2 = objective_weights(Grid(2), 1e-4);
  const std::vector<double> want{1, 1, 1, 1, 0.5, 0.5, 0.5, 0.5};
  CHECK(w2.diag_j == want);
  CHECK(w2.j2_scale == 1e-4);

  CHECK(objective_weights(Grid(1), 1.0).diag_j == std::vector<double>{0.5});

  for (int n : {1, 2, 3, 4, 5}) {
    const auto w = objective_weights(Grid(n), 0.5);
    double sum = 0.0;
    std::size_t halves = 0;
    for (double v : w.diag_j) {
      CHECK((v == 1.0 || v == 0.5));
      sum += v;
      if (v == 0.5) ++halves;
    }
    CHECK(sum == doctest::Approx(n * n * n - n * n / 2.0));
    CHECK(halves == static_cast<std::size_t>(n) * n);
  }
}

TEST_CASE("l2 misfit rule") {
  const Grid grid(5);
  auto zero = [](double, double, double) { return 0.0; };

  std::vector<double> y(grid.size(), 0.0);
  CHECK(l2_misfit(y, zero, grid) == 0.0);

  // constant field against a zero target: closed-form quadrature
  const double c = 2.25;
  y.assign(grid.size(), c);
  const double want = c * std::sqrt(static_cast<double>(grid.size())) * std::pow(grid.h, 1.5);
  CHECK(l2_misfit(y, zero, grid) == doctest::Approx(want).epsilon(1e-14));

  // exact desired-state samples leave no misfit under the interior rule
  const auto ybar = desired_state(grid);
  CHECK(l2_misfit(ybar, desired_state_at, grid) == 0.0);

  // absolute homogeneity
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (auto& v : y) v = gauss(rng);
  const double base = l2_misfit(y, zero, grid);
  auto scaled = y;
  for (auto& v : scaled) v *= -3.7;
  CHECK(l2_misfit(scaled, zero, grid) == doctest::Approx(3.7 * base).epsilon(1e-13));

  CHECK_THROWS_AS(l2_misfit(std::vector<double>(7), zero, grid), std::invalid_argument);
}
