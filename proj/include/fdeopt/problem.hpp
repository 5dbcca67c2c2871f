#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace fdeopt {

/// Unbounded box sides are IEEE infinities; projections treat them as absent.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Continuous problem parameters on the fixed domain (0,1)^2 x (0,1).
struct ProblemSpec {
  double alpha = 0.7;   // time-fractional order, 0 < alpha < 1
  double beta1 = 1.3;   // space-fractional orders, 1 < beta < 2
  double beta2 = 1.3;
  double gamma = 1e-4;  // control regularization weight
  int n = 8;            // grid points per dimension (n_x1 = n_x2 = n_t)
  double y_lo = -kUnbounded, y_hi = kUnbounded;
  double u_lo = -kUnbounded, u_hi = kUnbounded;

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

/// Uniform grid with h_x = h_t = 1/(n+1) and interior nodes i*h, i = 1..n.
/// Vector layout is lexicographic with time outermost, then x1, then x2.
struct Grid {
  explicit Grid(int n_points);

  int n;
  double h;

  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
  std::size_t index(int k, int i, int j) const {
    return (static_cast<std::size_t>(k) * n + i) * n + j;
  }
  /// Coordinate of the 0-based interior node index.
  double coord(int i) const { return (i + 1) * h; }
};

/// psi = min(h_t^alpha, h_x^beta1, h_x^beta2) and the derived ratios nu_i.
struct ScalingConstants {
  double psi;
  double nu1, nu2, nu3;
};

ScalingConstants scaling(const ProblemSpec& spec, const Grid& grid);

/// Fractional binomial coefficients g_0..g_{count-1} for order in
/// (0,1) u (1,2), by the two-term recursion g_k = (1 - (order+1)/k) g_{k-1}.
std::vector<double> frac_coeffs(double order, int count);

/// The built-in desired state: 10 cos(10 x1) sin(x1 x2) (1 - e^{-5t}).
double desired_state_at(double x1, double x2, double t);

/// Desired state sampled at all interior space-time nodes in grid layout.
std::vector<double> desired_state(const Grid& grid);

/// Trapezoidal objective weights: 1 on time blocks 1..n-1, 1/2 on block n.
struct ObjectiveWeights {
  std::vector<double> diag_j;
  double j1_scale = 1.0;
  double j2_scale;  // gamma
};

ObjectiveWeights objective_weights(const Grid& grid, double gamma);

/// Space-time L2 misfit of y against a desired-state closure, approximated by
/// the rule (h_x^2 h_t)^{1/2} ||y - ybar||_2 over the computed grid nodes.
double l2_misfit(std::span<const double> y,
                 const std::function<double(double, double, double)>& ybar_fn,
                 const Grid& grid);

}  // namespace fdeopt
