#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fdeopt/admm.hpp"
#include "fdeopt/circulant.hpp"
#include "fdeopt/problem.hpp"
#include "fdeopt/toeplitz.hpp"

// Dense brute-force references for the structured kernels and whole-solve
// equivalence at tiny sizes. Test/validate-only: never used on solve paths.
namespace fdeopt::oracle {

/// Hard cap on the per-dimension size of any dense assembly.
inline constexpr int kDenseCap = 6;

Eigen::MatrixXd dense_toeplitz(const ToeplitzSpec1D& spec);
Eigen::MatrixXd dense_circulant(std::span<const double> first_col);
Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Dense B = psi D assembled by explicit Kronecker products.
Eigen::MatrixXd dense_constraint(const ProblemSpec& spec, const Grid& grid);

/// Dense 3-level T. Chan approximation C3(B) from the 1-level factors.
Eigen::MatrixXd dense_c3(const ConstraintOperator& op);

/// Dense S~ = rho(1+1/delta) I + C3(B)^T C3(B)/m2.
Eigen::MatrixXd dense_precond(const ConstraintOperator& op, const CirculantPreconditioner& pc);

/// Dense normal-equations matrix S = rho(J + 1/delta) + B^T M2^{-1} B.
Eigen::MatrixXd dense_normal_matrix(const AdmmWork& work, const Eigen::MatrixXd& B);

/// apply_B via a single complex 3D FFT of the full embedded coefficient
/// tensor (size (2n)^3); an independent second structured path, n <= 8.
/// Returns the result and the relative imaginary residue before truncation.
std::pair<std::vector<double>, double> apply_constraint_3d_fft(const ConstraintOperator& op,
                                                               std::span<const double> x,
                                                               bool adjoint = false);

struct DenseProblem {
  Eigen::MatrixXd B;
  Eigen::VectorXd diag_j1, diag_j2;  // J and (gamma/psi^2) J
  Eigen::VectorXd ybar, g;
  double psi, gamma, delta, rho;
  double y_lo, y_hi, v_lo, v_hi;  // v bounds already scaled by psi
  std::size_t size() const { return static_cast<std::size_t>(B.rows()); }
};

DenseProblem make_dense_problem(const ProblemSpec& spec, const AdmmConfig& cfg);

struct DenseState {
  Eigen::VectorXd y, v, z_y, z_v, p, w_y, w_v;
};

DenseState dense_zero_state(std::size_t n_total);

/// One exact ADMM iteration with the merged saddle system solved by a dense
/// LU factorization.
void dense_admm_step(const DenseProblem& dp, DenseState& state);

/// Direct solve of the equality-constrained (unbounded) KKT system.
void dense_kkt_solve(const DenseProblem& dp, Eigen::VectorXd& y, Eigen::VectorXd& v,
                     Eigen::VectorXd& p);

struct KktResidual {
  double stationarity_y, stationarity_v;
  double primal;
  double bound_violation;
  double complementarity;
  double max_stationarity() const { return std::max(stationarity_y, stationarity_v); }
};

KktResidual kkt_residual(const DenseProblem& dp, const DenseState& s);

struct CheckResult {
  std::string name;
  double max_err;
  double threshold;
  bool pass() const { return max_err <= threshold; }
};

/// Runs every oracle equivalence at sizes up to `cap`. `perturb` injects a
/// coefficient fault into the structured operator (testing hook); a correct
/// build passes with perturb = 0 and fails the matvec equivalence otherwise.
std::vector<CheckResult> run_validation(int cap = 4, double perturb = 0.0, unsigned seed = 1);

}  // namespace fdeopt::oracle
