#include "fdeopt/toeplitz.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fdeopt {

ToeplitzSpec1D build_caputo(double alpha, int n, double h_t) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("build_caputo: alpha must lie in (0, 1)");
  if (n < 1 || !(h_t > 0.0)) throw std::invalid_argument("build_caputo: bad grid parameters");
  const double scale = 1.0 / std::pow(h_t, alpha);
  ToeplitzSpec1D spec;
  spec.col = frac_coeffs(alpha, n);
  for (auto& v : spec.col) v *= scale;
  spec.row.assign(n, 0.0);
  spec.row[0] = spec.col[0];
  return spec;
}

ToeplitzSpec1D build_riesz(double beta, int n, double h_x) {
  if (!(beta > 1.0 && beta < 2.0))
    throw std::invalid_argument("build_riesz: beta must lie in (1, 2)");
  if (n < 1 || !(h_x > 0.0)) throw std::invalid_argument("build_riesz: bad grid parameters");
  const double c = std::cos(beta * std::numbers::pi / 2.0);
  if (std::abs(c) < 1e-6)
    throw std::invalid_argument("build_riesz: beta too close to 1, |cos(beta pi/2)| = " +
                                std::to_string(std::abs(c)));
  const std::vector<double> g = frac_coeffs(beta, n + 1);
  const double scale = -1.0 / (2.0 * c * std::pow(h_x, beta));
  ToeplitzSpec1D spec;
  spec.col.resize(n);
  // L^{beta,l} + transpose: diagonal 2 g_1, first off-diagonal g_2 + g_0,
  // then g_{k+1} further out.
  spec.col[0] = scale * 2.0 * g[1];
  if (n > 1) spec.col[1] = scale * (g[2] + g[0]);
  for (int k = 2; k < n; ++k) spec.col[k] = scale * g[k + 1];
  spec.row = spec.col;
  return spec;
}

namespace detail {

std::vector<fft::Complex> embed_symbol(const ToeplitzSpec1D& spec, bool transpose) {
  const int n = spec.size();
  const auto& col = transpose ? spec.row : spec.col;
  const auto& row = transpose ? spec.col : spec.row;
  // First column of the 2n circulant: (t_0..t_{n-1}, 0, t_{-(n-1)}..t_{-1}).
  std::vector<double> c(2 * static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) c[k] = col[k];
  for (int k = 1; k < n; ++k) c[n + k] = row[n - k];
  fft::BatchedRealFft plan(2 * n, 1);
  std::vector<fft::Complex> sym(plan.spec_len());
  plan.forward(c.data(), sym.data());
  return sym;
}

}  // namespace detail

std::vector<double> toeplitz_matvec(const ToeplitzSpec1D& spec, std::span<const double> x,
                                    bool transpose) {
  const int n = spec.size();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("toeplitz_matvec: dimension mismatch");
  const auto sym = detail::embed_symbol(spec, transpose);
  fft::BatchedRealFft plan(2 * n, 1);
  std::vector<double> buf(2 * static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) buf[k] = x[k];
  std::vector<fft::Complex> f(plan.spec_len());
  plan.forward(buf.data(), f.data());
  for (int k = 0; k < plan.spec_len(); ++k) f[k] *= sym[k];
  plan.inverse(f.data(), buf.data());
  std::vector<double> out(n);
  const double inv_len = 1.0 / (2.0 * n);
  for (int k = 0; k < n; ++k) out[k] = buf[k] * inv_len;
  return out;
}

ConstraintOperator::ConstraintOperator(const ProblemSpec& spec, const Grid& grid)
    : ConstraintOperator(build_caputo(spec.alpha, grid.n, grid.h),
                         build_riesz(spec.beta1, grid.n, grid.h),
                         build_riesz(spec.beta2, grid.n, grid.h), scaling(spec, grid).psi,
                         grid.n) {}

ConstraintOperator::ConstraintOperator(ToeplitzSpec1D caputo, ToeplitzSpec1D riesz1,
                                       ToeplitzSpec1D riesz2, double psi, int n)
    : n_(n),
      psi_(psi),
      caputo_(std::move(caputo)),
      riesz1_(std::move(riesz1)),
      riesz2_(std::move(riesz2)),
      sym_time_(detail::embed_symbol(caputo_, false)),
      sym_time_adj_(detail::embed_symbol(caputo_, true)),
      sym_riesz1_(detail::embed_symbol(riesz1_, false)),
      sym_riesz2_(detail::embed_symbol(riesz2_, false)),
      batch_(2 * n, n * n) {
  if (caputo_.size() != n || riesz1_.size() != n || riesz2_.size() != n)
    throw std::invalid_argument("ConstraintOperator: factor size mismatch");
}

ConstraintOperator ConstraintOperator::zero(int n) {
  ToeplitzSpec1D z;
  z.col.assign(n, 0.0);
  z.row.assign(n, 0.0);
  return ConstraintOperator(z, z, z, 1.0, n);
}

std::size_t ConstraintOperator::Workspace::bytes() const {
  return rows.capacity() * sizeof(double) + spec.capacity() * sizeof(fft::Complex) +
         mode_out.capacity() * sizeof(double);
}

ConstraintOperator::Workspace ConstraintOperator::make_workspace() const {
  Workspace ws;
  const std::size_t nn = static_cast<std::size_t>(n_) * n_;
  ws.rows.assign(nn * 2 * n_, 0.0);
  ws.spec.assign(nn * (n_ + 1), {});
  ws.mode_out.assign(size(), 0.0);
  return ws;
}

void ConstraintOperator::apply_mode(int mode, std::span<const double> x, std::span<double> out,
                                    Workspace& ws, const std::vector<fft::Complex>& symbol,
                                    double scale) const {
  const int n = n_;
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  const int len = 2 * n;
  const int sl = n + 1;
  // Pack fibers along `mode` into contiguous zero-padded rows.
  std::fill(ws.rows.begin(), ws.rows.end(), 0.0);
  double* rows = ws.rows.data();
  if (mode == 0) {  // time: x[(k*n + i)*n + j], fiber id f = i*n + j
    for (int k = 0; k < n; ++k) {
      const double* xp = x.data() + k * nn;
      for (std::size_t f = 0; f < nn; ++f) rows[f * len + k] = xp[f];
    }
  } else if (mode == 1) {  // x1: fiber id f = k*n + j
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        const double* xp = x.data() + (static_cast<std::size_t>(k) * n + i) * n;
        double* rp = rows + (static_cast<std::size_t>(k) * n) * len + i;
        for (int j = 0; j < n; ++j) rp[static_cast<std::size_t>(j) * len] = xp[j];
      }
  } else {  // x2: contiguous fibers, fiber id f = k*n + i
    for (std::size_t f = 0; f < nn; ++f)
      for (int j = 0; j < n; ++j) rows[f * len + j] = x[f * n + j];
  }
  batch_.forward(rows, ws.spec.data());
  fft::Complex* sp = ws.spec.data();
  for (std::size_t f = 0; f < nn; ++f)
    for (int b = 0; b < sl; ++b) sp[f * sl + b] *= symbol[b];
  batch_.inverse(ws.spec.data(), rows);
  const double w = scale / len;
  if (mode == 0) {
    for (int k = 0; k < n; ++k) {
      double* op = out.data() + k * nn;
      for (std::size_t f = 0; f < nn; ++f) op[f] += w * rows[f * len + k];
    }
  } else if (mode == 1) {
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        double* op = out.data() + (static_cast<std::size_t>(k) * n + i) * n;
        const double* rp = rows + (static_cast<std::size_t>(k) * n) * len + i;
        for (int j = 0; j < n; ++j) op[j] += w * rp[static_cast<std::size_t>(j) * len];
      }
  } else {
    for (std::size_t f = 0; f < nn; ++f)
      for (int j = 0; j < n; ++j) out[f * n + j] += w * rows[f * len + j];
  }
}

void ConstraintOperator::apply(std::span<const double> x, std::span<double> out, Workspace& ws,
                               bool adjoint) const {
  if (x.size() != size() || out.size() != size())
    throw std::invalid_argument("ConstraintOperator::apply: dimension mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  apply_mode(0, x, out, ws, adjoint ? sym_time_adj_ : sym_time_, psi_);
  apply_mode(1, x, out, ws, sym_riesz1_, -psi_);  // Riesz factors are symmetric
  apply_mode(2, x, out, ws, sym_riesz2_, -psi_);
}

std::vector<double> ConstraintOperator::apply(std::span<const double> x, bool adjoint) const {
  Workspace ws = make_workspace();
  std::vector<double> out(size());
  apply(x, out, ws, adjoint);
  return out;
}

std::size_t ConstraintOperator::coefficient_bytes() const {
  auto spec_bytes = [](const ToeplitzSpec1D& s) {
    return (s.col.capacity() + s.row.capacity()) * sizeof(double);
  };
  auto sym_bytes = [](const std::vector<fft::Complex>& s) {
    return s.capacity() * sizeof(fft::Complex);
  };
  return spec_bytes(caputo_) + spec_bytes(riesz1_) + spec_bytes(riesz2_) + sym_bytes(sym_time_) +
         sym_bytes(sym_time_adj_) + sym_bytes(sym_riesz1_) + sym_bytes(sym_riesz2_);
}

}  // namespace fdeopt
