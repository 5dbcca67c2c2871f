#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fdeopt/circulant.hpp"
#include "fdeopt/problem.hpp"
#include "fdeopt/toeplitz.hpp"

namespace fdeopt {

struct AdmmConfig {
  double delta = 0.4;            // penalty parameter
  double rho = 1.618;            // step length, must lie in (0, (sqrt(5)+1)/2)
  double tol_primal = 1e-4;      // infinity-norm tolerance on all three residuals
  int max_outer = 500;
  double inner_tol_floor = 1e-4;
  double inner_tol_factor = 0.05;
  int max_inner = 400;
  bool warm_start = false;       // PCG from previous y (off: iteration counts
                                 // track the reference experiment)

  void validate() const;
};

/// Primal, copy, and dual iterates in the scaled-control variables (v = psi u).
struct AdmmState {
  std::vector<double> y, v, z_y, z_v, p, w_y, w_v;
  int iteration = 0;
};

struct IterRecord {
  int iter;
  double r_eq, r_y, r_u;  // primal residuals (r_u in unscaled control)
  double dual_inf;
  int inner_iters;
  double inner_tol;
};

enum class SolveStatus { converged, iteration_cap, failure };
std::string to_string(SolveStatus s);

struct SolveResult {
  std::vector<double> y, u, p, w_y, w_v, z_y, z_v;
  int iterations = 0;
  double pcg_avg = 0.0;
  double misfit = 0.0;
  double dual_inf = 0.0;
  double wall_seconds = 0.0;
  SolveStatus status = SolveStatus::failure;
  std::vector<IterRecord> history;
};

/// Problem-constant data shared by the per-iteration kernels: diagonal blocks
/// of the merged saddle system in scaled variables (J2 = (gamma/psi^2) J,
/// constraint B y + v = psi g, copy bounds psi [u_lo, u_hi]).
struct AdmmWork {
  const ConstraintOperator* op = nullptr;
  AdmmConfig cfg;
  std::vector<double> diag_j;    // J
  std::vector<double> diag_j2;   // (gamma/psi^2) J
  std::vector<double> m2;        // (rho(J2 + 1/delta))^{-1} + delta/rho
  std::vector<double> a2_inv;    // (rho(J2 + 1/delta))^{-1}
  std::vector<double> ybar;
  std::vector<double> g;         // raw source term (zero for the built-in experiment)
  double psi = 1.0;
  double y_lo, y_hi, v_lo, v_hi;
  std::size_t size() const { return diag_j.size(); }
};

AdmmWork make_admm_work(const ProblemSpec& spec, const AdmmConfig& cfg,
                        const ConstraintOperator& op);

AdmmState zero_state(std::size_t n_total);

/// S x = rho(J + 1/delta) x + B^T M2^{-1} B x  (two operator applies).
void apply_S(const AdmmWork& work, std::span<const double> x, std::span<double> out,
             ConstraintOperator::Workspace& ws);

/// Assembles the normal-equations right-hand side; returns the r-vector cache
/// needed by recover_vp.
std::vector<double> build_rhs(const AdmmWork& work, const AdmmState& state,
                              std::vector<double>& rhs, ConstraintOperator::Workspace& ws);

struct PcgResult {
  int iterations = 0;
  bool converged = false;
  double rel_residual = 0.0;
};

using LinearFn = std::function<void(std::span<const double>, std::span<double>)>;

/// Preconditioned conjugate gradients on an SPD operator; terminates when the
/// true relative residual ||b - Ax||/||b|| drops below tol. Deterministic.
PcgResult pcg(const LinearFn& apply, const LinearFn& precond, std::span<const double> rhs,
              std::vector<double>& x, double tol, int max_inner);

/// Recovers (v, p~) from the PCG solution: p~ = M2^{-1}(B y + r),
/// v = (rho(J2 + 1/delta))^{-1}(-p~ - rho w_v + (rho/delta) z_v + (1-rho) p).
void recover_vp(const AdmmWork& work, const AdmmState& state, std::span<const double> By,
                std::span<const double> r_cache, std::vector<double>& v_out,
                std::vector<double>& p_out);

/// z_y = clamp(y + delta w_y, bounds), z_v = clamp(v + delta w_v, psi bounds).
void z_update(const AdmmWork& work, AdmmState& state);

/// p += (rho/delta)(B y + v - psi g); w += (rho/delta) (primal - copy).
void dual_update(const AdmmWork& work, AdmmState& state, std::span<const double> By);

struct Termination {
  double r_eq, r_y, r_u;
  bool converged;
  double inner_tol;  // for the next PCG solve
};

Termination check_termination(const AdmmWork& work, const AdmmState& state,
                              std::span<const double> By);

/// Stationarity residual of the augmented problem in scaled variables:
/// max(||J(y - ybar) + B^T p + w_y||_inf, ||J2 v + p + w_v||_inf).
double dual_infeasibility(const AdmmWork& work, const AdmmState& state,
                          ConstraintOperator::Workspace& ws);

/// One outer iteration with reusable scratch; drives Algorithm 1 with the
/// merged (y,p) sub-problem solved by PCG on the normal equations.
class AdmmDriver {
public:
  AdmmDriver(const ProblemSpec& spec, const AdmmConfig& cfg, const ConstraintOperator& op,
             const CirculantPreconditioner& pc);

  IterRecord step();
  bool converged() const { return converged_; }
  const AdmmState& state() const { return state_; }
  AdmmState& state() { return state_; }
  const AdmmWork& work() const { return work_; }
  int consecutive_stagnations() const { return stagnations_; }

private:
  AdmmWork work_;
  const CirculantPreconditioner* pc_;
  AdmmState state_;
  ConstraintOperator::Workspace op_ws_;
  CirculantPreconditioner::Workspace pc_ws_;
  std::vector<double> By_;
  double inner_tol_;
  bool converged_ = false;
  int stagnations_ = 0;
};

using IterCallback = std::function<void(const IterRecord&)>;

SolveResult solve(const ProblemSpec& spec, const AdmmConfig& cfg,
                  const IterCallback& callback = nullptr);

}  // namespace fdeopt
