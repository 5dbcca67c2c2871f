#include "fdeopt/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fdeopt {

void ProblemSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1), got " + std::to_string(alpha));
  if (!(beta1 > 1.0 && beta1 < 2.0))
    throw std::invalid_argument("beta1 must lie in (1, 2), got " + std::to_string(beta1));
  if (!(beta2 > 1.0 && beta2 < 2.0))
    throw std::invalid_argument("beta2 must lie in (1, 2), got " + std::to_string(beta2));
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(y_lo < y_hi)) throw std::invalid_argument("state bounds must satisfy y_lo < y_hi");
  if (!(u_lo < u_hi)) throw std::invalid_argument("control bounds must satisfy u_lo < u_hi");
}

Grid::Grid(int n_points) : n(n_points), h(1.0 / (n_points + 1)) {
  if (n_points < 1) throw std::invalid_argument("Grid: n must be >= 1");
}

ScalingConstants scaling(const ProblemSpec& spec, const Grid& grid) {
  spec.validate();
  const double ht_a = std::pow(grid.h, spec.alpha);
  const double hx_b1 = std::pow(grid.h, spec.beta1);
  const double hx_b2 = std::pow(grid.h, spec.beta2);
  const double psi = std::min(ht_a, std::min(hx_b1, hx_b2));
  return {psi, psi / hx_b1, psi / hx_b2, psi / ht_a};
}

std::vector<double> frac_coeffs(double order, int count) {
  const bool valid = (order > 0.0 && order < 1.0) || (order > 1.0 && order < 2.0);
  if (!valid)
    throw std::invalid_argument("fractional order must lie in (0,1) or (1,2), got " +
                                std::to_string(order));
  if (count < 1) throw std::invalid_argument("coefficient count must be >= 1");
  std::vector<double> g(count);
  g[0] = 1.0;
  for (int k = 1; k < count; ++k) g[k] = (1.0 - (order + 1.0) / k) * g[k - 1];
  return g;
}

double desired_state_at(double x1, double x2, double t) {
  return 10.0 * std::cos(10.0 * x1) * std::sin(x1 * x2) * (1.0 - std::exp(-5.0 * t));
}

std::vector<double> desired_state(const Grid& grid) {
  std::vector<double> out(grid.size());
  for (int k = 0; k < grid.n; ++k)
    for (int i = 0; i < grid.n; ++i)
      for (int j = 0; j < grid.n; ++j)
        out[grid.index(k, i, j)] = desired_state_at(grid.coord(i), grid.coord(j), grid.coord(k));
  return out;
}

ObjectiveWeights objective_weights(const Grid& grid, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  ObjectiveWeights w;
  w.diag_j.assign(grid.size(), 1.0);
  const std::size_t last_block = static_cast<std::size_t>(grid.n - 1) * grid.n * grid.n;
  for (std::size_t i = last_block; i < grid.size(); ++i) w.diag_j[i] = 0.5;
  w.j2_scale = gamma;
  return w;
}

double l2_misfit(std::span<const double> y,
                 const std::function<double(double, double, double)>& ybar_fn,
                 const Grid& grid) {
  if (y.size() != grid.size()) throw std::invalid_argument("l2_misfit: vector/grid size mismatch");
  double acc = 0.0;
  for (int k = 0; k < grid.n; ++k)
    for (int i = 0; i < grid.n; ++i)
      for (int j = 0; j < grid.n; ++j) {
        const double d =
            y[grid.index(k, i, j)] - ybar_fn(grid.coord(i), grid.coord(j), grid.coord(k));
        acc += d * d;
      }
  return std::sqrt(acc * grid.h * grid.h * grid.h);
}

}  // namespace fdeopt
