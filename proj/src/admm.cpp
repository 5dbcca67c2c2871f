#include "fdeopt/admm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fdeopt {

namespace {

double inf_norm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

bool all_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

void AdmmConfig::validate() const {
  constexpr double rho_max = 1.6180339887498949;  // (sqrt(5)+1)/2
  if (!(rho > 0.0 && rho < rho_max))
    throw std::invalid_argument("rho must lie in (0, (sqrt(5)+1)/2)");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(tol_primal > 0.0) || !(inner_tol_floor > 0.0) || !(inner_tol_factor > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (max_outer < 1 || max_inner < 1) throw std::invalid_argument("iteration caps must be >= 1");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::iteration_cap: return "itercap";
    default: return "failed";
  }
}

AdmmWork make_admm_work(const ProblemSpec& spec, const AdmmConfig& cfg,
                        const ConstraintOperator& op) {
  spec.validate();
  cfg.validate();
  const Grid grid(spec.n);
  AdmmWork w;
  w.op = &op;
  w.cfg = cfg;
  w.psi = op.psi();
  w.diag_j = objective_weights(grid, spec.gamma).diag_j;
  const std::size_t N = w.diag_j.size();
  w.diag_j2.resize(N);
  w.m2.resize(N);
  w.a2_inv.resize(N);
  const double g_over_psi2 = spec.gamma / (w.psi * w.psi);
  for (std::size_t i = 0; i < N; ++i) {
    w.diag_j2[i] = g_over_psi2 * w.diag_j[i];
    w.a2_inv[i] = 1.0 / (cfg.rho * (w.diag_j2[i] + 1.0 / cfg.delta));
    w.m2[i] = w.a2_inv[i] + cfg.delta / cfg.rho;
  }
  w.ybar = desired_state(grid);
  w.g.assign(N, 0.0);
  w.y_lo = spec.y_lo;
  w.y_hi = spec.y_hi;
  w.v_lo = w.psi * spec.u_lo;
  w.v_hi = w.psi * spec.u_hi;
  return w;
}

AdmmState zero_state(std::size_t n_total) {
  AdmmState s;
  for (auto* v : {&s.y, &s.v, &s.z_y, &s.z_v, &s.p, &s.w_y, &s.w_v}) v->assign(n_total, 0.0);
  return s;
}

void apply_S(const AdmmWork& work, std::span<const double> x, std::span<double> out,
             ConstraintOperator::Workspace& ws) {
  const std::size_t N = work.size();
  if (x.size() != N || out.size() != N) throw std::invalid_argument("apply_S: dimension mismatch");
  std::vector<double> bx(N), btm(N);
  work.op->apply(x, bx, ws, false);
  for (std::size_t i = 0; i < N; ++i) bx[i] /= work.m2[i];
  work.op->apply(bx, btm, ws, true);
  const double rho = work.cfg.rho, delta = work.cfg.delta;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = rho * (work.diag_j[i] + 1.0 / delta) * x[i] + btm[i];
}

std::vector<double> build_rhs(const AdmmWork& work, const AdmmState& state,
                              std::vector<double>& rhs, ConstraintOperator::Workspace& ws) {
  const std::size_t N = work.size();
  const double rho = work.cfg.rho, delta = work.cfg.delta;
  // r = -psi g + (delta/rho) p + A2^{-1} (rho(-w_v + z_v/delta) + (1-rho) p)
  std::vector<double> r(N);
  for (std::size_t i = 0; i < N; ++i)
    r[i] = -work.psi * work.g[i] + (delta / rho) * state.p[i] +
           work.a2_inv[i] *
               (rho * (-state.w_v[i] + state.z_v[i] / delta) + (1.0 - rho) * state.p[i]);
  // rhs = rho(J ybar - w_y + z_y/delta) + B^T ((1-rho) p - M2^{-1} r)
  std::vector<double> tmp(N);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = (1.0 - rho) * state.p[i] - r[i] / work.m2[i];
  rhs.resize(N);
  work.op->apply(tmp, rhs, ws, true);
  for (std::size_t i = 0; i < N; ++i)
    rhs[i] += rho * (work.diag_j[i] * work.ybar[i] - state.w_y[i] + state.z_y[i] / delta);
  return r;
}

PcgResult pcg(const LinearFn& apply, const LinearFn& precond, std::span<const double> rhs,
              std::vector<double>& x, double tol, int max_inner) {
  const std::size_t N = rhs.size();
  const double nb = norm2(rhs);
  if (nb == 0.0) {
    x.assign(N, 0.0);
    return {0, true, 0.0};
  }
  if (x.size() != N) x.assign(N, 0.0);
  std::vector<double> r(N), z(N), p(N), q(N);
  if (norm2(x) == 0.0) {
    std::copy(rhs.begin(), rhs.end(), r.begin());
  } else {
    apply(x, q);
    for (std::size_t i = 0; i < N; ++i) r[i] = rhs[i] - q[i];
  }
  precond(r, z);
  std::copy(z.begin(), z.end(), p.begin());
  double rz = dot(r, z);
  for (int it = 1; it <= max_inner; ++it) {
    apply(p, q);
    const double pq = dot(p, q);
    if (!std::isfinite(pq) || pq <= 0.0)
      throw std::runtime_error("pcg: operator lost positive definiteness");
    const double a = rz / pq;
    for (std::size_t i = 0; i < N; ++i) {
      x[i] += a * p[i];
      r[i] -= a * q[i];
    }
    double rn = norm2(r);
    if (!std::isfinite(rn)) throw std::runtime_error("pcg: non-finite residual");
    if (rn <= tol * nb) {
      // confirm with the true residual before accepting
      apply(x, q);
      for (std::size_t i = 0; i < N; ++i) r[i] = rhs[i] - q[i];
      rn = norm2(r);
      if (rn <= tol * nb) return {it, true, rn / nb};
    }
    precond(r, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < N; ++i) p[i] = z[i] + beta * p[i];
  }
  std::vector<double> res(N);
  apply(x, res);
  for (std::size_t i = 0; i < N; ++i) res[i] = rhs[i] - res[i];
  return {max_inner, false, norm2(res) / nb};
}

void recover_vp(const AdmmWork& work, const AdmmState& state, std::span<const double> By,
                std::span<const double> r_cache, std::vector<double>& v_out,
                std::vector<double>& p_out) {
  const std::size_t N = work.size();
  const double rho = work.cfg.rho, delta = work.cfg.delta;
  p_out.resize(N);
  v_out.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    p_out[i] = (By[i] + r_cache[i]) / work.m2[i];
    v_out[i] = work.a2_inv[i] * (-p_out[i] - rho * state.w_v[i] + (rho / delta) * state.z_v[i] +
                                 (1.0 - rho) * state.p[i]);
  }
}

void z_update(const AdmmWork& work, AdmmState& state) {
  const double delta = work.cfg.delta;
  for (std::size_t i = 0; i < work.size(); ++i) {
    state.z_y[i] = std::clamp(state.y[i] + delta * state.w_y[i], work.y_lo, work.y_hi);
    state.z_v[i] = std::clamp(state.v[i] + delta * state.w_v[i], work.v_lo, work.v_hi);
  }
}

void dual_update(const AdmmWork& work, AdmmState& state, std::span<const double> By) {
  const double step = work.cfg.rho / work.cfg.delta;
  for (std::size_t i = 0; i < work.size(); ++i) {
    state.p[i] += step * (By[i] + state.v[i] - work.psi * work.g[i]);
    state.w_y[i] += step * (state.y[i] - state.z_y[i]);
    state.w_v[i] += step * (state.v[i] - state.z_v[i]);
  }
}

Termination check_termination(const AdmmWork& work, const AdmmState& state,
                              std::span<const double> By) {
  Termination t{};
  double r_eq = 0.0, r_y = 0.0, r_v = 0.0;
  for (std::size_t i = 0; i < work.size(); ++i) {
    r_eq = std::max(r_eq, std::abs(By[i] + state.v[i] - work.psi * work.g[i]));
    r_y = std::max(r_y, std::abs(state.y[i] - state.z_y[i]));
    r_v = std::max(r_v, std::abs(state.v[i] - state.z_v[i]));
  }
  t.r_eq = r_eq;
  t.r_y = r_y;
  t.r_u = r_v / work.psi;  // the third residual is checked in unscaled control
  const double tol = work.cfg.tol_primal;
  t.converged = (t.r_eq <= tol && t.r_y <= tol && t.r_u <= tol);
  t.inner_tol = work.cfg.inner_tol_factor *
                std::max(std::min({t.r_eq, t.r_y, t.r_u}), work.cfg.inner_tol_floor);
  return t;
}

double dual_infeasibility(const AdmmWork& work, const AdmmState& state,
                          ConstraintOperator::Workspace& ws) {
  const std::size_t N = work.size();
  std::vector<double> btp(N);
  work.op->apply(state.p, btp, ws, true);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    s1 = std::max(s1, std::abs(work.diag_j[i] * (state.y[i] - work.ybar[i]) + btp[i] +
                               state.w_y[i]));
    s2 = std::max(s2, std::abs(work.diag_j2[i] * state.v[i] + state.p[i] + state.w_v[i]));
  }
  return std::max(s1, s2);
}

AdmmDriver::AdmmDriver(const ProblemSpec& spec, const AdmmConfig& cfg,
                       const ConstraintOperator& op, const CirculantPreconditioner& pc)
    : work_(make_admm_work(spec, cfg, op)),
      pc_(&pc),
      state_(zero_state(work_.size())),
      op_ws_(op.make_workspace()),
      pc_ws_(pc.make_workspace()),
      By_(work_.size(), 0.0),
      inner_tol_(cfg.inner_tol_factor * cfg.inner_tol_floor) {}

IterRecord AdmmDriver::step() {
  const auto& work = work_;
  std::vector<double> rhs;
  const std::vector<double> r_cache = build_rhs(work, state_, rhs, op_ws_);

  LinearFn apply = [&](std::span<const double> x, std::span<double> out) {
    apply_S(work, x, out, op_ws_);
  };
  LinearFn precond = [&](std::span<const double> r, std::span<double> z) {
    pc_->solve(r, z, pc_ws_);
  };
  if (!work.cfg.warm_start) state_.y.assign(work.size(), 0.0);
  const PcgResult inner = pcg(apply, precond, rhs, state_.y, inner_tol_, work.cfg.max_inner);
  stagnations_ = inner.converged ? 0 : stagnations_ + 1;

  work.op->apply(state_.y, By_, op_ws_, false);
  std::vector<double> p_tilde;
  recover_vp(work, state_, By_, r_cache, state_.v, p_tilde);
  z_update(work, state_);
  dual_update(work, state_, By_);
  ++state_.iteration;

  if (!all_finite(state_.y) || !all_finite(state_.v) || !all_finite(state_.p))
    throw std::runtime_error("admm: non-finite iterate at outer iteration " +
                             std::to_string(state_.iteration));

  const Termination t = check_termination(work, state_, By_);
  converged_ = t.converged;
  inner_tol_ = t.inner_tol;
  IterRecord rec{state_.iteration, t.r_eq, t.r_y, t.r_u, 0.0, inner.iterations, t.inner_tol};
  rec.dual_inf = dual_infeasibility(work, state_, op_ws_);
  return rec;
}

SolveResult solve(const ProblemSpec& spec, const AdmmConfig& cfg, const IterCallback& callback) {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid grid(spec.n);
  const ConstraintOperator op(spec, grid);
  const CirculantPreconditioner pc = assemble_precond(op, cfg.rho, cfg.delta, spec.gamma);
  AdmmDriver driver(spec, cfg, op, pc);

  SolveResult result;
  long total_inner = 0;
  try {
    for (int j = 0; j < cfg.max_outer; ++j) {
      const IterRecord rec = driver.step();
      total_inner += rec.inner_iters;
      result.history.push_back(rec);
      if (callback) callback(rec);
      if (driver.consecutive_stagnations() >= 3)
        throw std::runtime_error("admm: PCG hit max_inner in 3 consecutive outer iterations");
      if (driver.converged()) break;
    }
  } catch (const std::runtime_error&) {
    result.status = SolveStatus::failure;
    result.iterations = driver.state().iteration;
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    throw;
  }

  const AdmmState& s = driver.state();
  result.iterations = s.iteration;
  result.pcg_avg = s.iteration > 0 ? static_cast<double>(total_inner) / s.iteration : 0.0;
  result.status = driver.converged() ? SolveStatus::converged : SolveStatus::iteration_cap;
  result.y = s.y;
  result.u.resize(s.v.size());
  const double psi = driver.work().psi;
  for (std::size_t i = 0; i < s.v.size(); ++i) result.u[i] = s.v[i] / psi;
  result.p = s.p;
  result.w_y = s.w_y;
  result.w_v = s.w_v;
  result.z_y = s.z_y;
  result.z_v = s.z_v;
  result.misfit = l2_misfit(result.y, desired_state_at, grid);
  auto ws = op.make_workspace();
  result.dual_inf = dual_infeasibility(driver.work(), s, ws);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace fdeopt
