#include "fdeopt/circulant.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fdeopt {

CirculantSpec1D tchan(const ToeplitzSpec1D& spec) {
  const int n = spec.size();
  if (n < 1) throw std::invalid_argument("tchan: empty spec");
  CirculantSpec1D c;
  c.first_col.resize(n);
  c.first_col[0] = spec.col[0];
  for (int i = 1; i < n; ++i)
    c.first_col[i] = ((n - i) * spec.col[i] + i * spec.row[n - i]) / n;
  c.eigs = circulant_eigs(c.first_col);
  return c;
}

std::vector<fft::Complex> circulant_eigs(std::span<const double> first_col) {
  if (first_col.empty()) throw std::invalid_argument("circulant_eigs: empty input");
  std::vector<fft::Complex> in(first_col.begin(), first_col.end());
  return fft::dft(in);
}

CirculantPreconditioner::CirculantPreconditioner(std::vector<fft::Complex> lam_b, double rho,
                                                 double delta, double gamma, double psi, int n)
    : n_(n), rho_(rho), delta_(delta), gamma_(gamma), psi_(psi), lam_b_(std::move(lam_b)),
      fft3_(n) {
  if (!(rho > 0.0) || !(delta > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("CirculantPreconditioner: scalars must be positive");
  if (lam_b_.size() != static_cast<std::size_t>(n) * n * n)
    throw std::invalid_argument("CirculantPreconditioner: eigenvalue size mismatch");
  const double m2 = 1.0 / (rho_ * (gamma_ / (psi_ * psi_) + 1.0 / delta_)) + delta_ / rho_;
  lam_s_.resize(lam_b_.size());
  const double base = rho_ * (1.0 + 1.0 / delta_);
  for (std::size_t i = 0; i < lam_b_.size(); ++i)
    lam_s_[i] = base + std::norm(lam_b_[i]) / m2;
}

CirculantPreconditioner::Workspace CirculantPreconditioner::make_workspace() const {
  Workspace ws;
  ws.freq.assign(size(), {});
  return ws;
}

void CirculantPreconditioner::solve(std::span<const double> r, std::span<double> z,
                                    Workspace& ws) const {
  if (r.size() != size() || z.size() != size())
    throw std::invalid_argument("precond_solve: dimension mismatch");
  for (std::size_t i = 0; i < r.size(); ++i) ws.freq[i] = r[i];
  fft3_.forward(ws.freq.data());
  for (std::size_t i = 0; i < r.size(); ++i) ws.freq[i] /= lam_s_[i];
  fft3_.inverse(ws.freq.data());
  const double inv_n = 1.0 / static_cast<double>(size());
  for (std::size_t i = 0; i < r.size(); ++i) z[i] = ws.freq[i].real() * inv_n;
#ifndef NDEBUG
  double im2 = 0.0, re2 = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    im2 += ws.freq[i].imag() * ws.freq[i].imag();
    re2 += ws.freq[i].real() * ws.freq[i].real();
  }
  assert(re2 == 0.0 || std::sqrt(im2 / re2) < 1e-10);
#endif
}

std::vector<double> CirculantPreconditioner::solve(std::span<const double> r) const {
  Workspace ws = make_workspace();
  std::vector<double> z(size());
  solve(r, z, ws);
  return z;
}

CirculantPreconditioner assemble_precond(const ConstraintOperator& op, double rho, double delta,
                                         double gamma) {
  const int n = op.n();
  const auto lam_t = tchan(op.caputo()).eigs;
  const auto lam_1 = tchan(op.riesz1()).eigs;
  const auto lam_2 = tchan(op.riesz2()).eigs;
  std::vector<fft::Complex> lam_b(op.size());
  const double psi = op.psi();
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        lam_b[(static_cast<std::size_t>(k) * n + i) * n + j] =
            psi * (lam_t[k] - (lam_1[i] + lam_2[j]));
  return CirculantPreconditioner(std::move(lam_b), rho, delta, gamma, psi, n);
}

namespace {

// Shared truncation: time indices k = 0..K-1, space indices k = -1..K-1.
struct SymbolTerms {
  std::vector<double> ga, gb1, gb2;
  double s1, s2;  // -nu_i / (2 cos(beta_i pi/2))
  double nu3;
};

SymbolTerms symbol_terms(const ScalingConstants& scals, double alpha, double beta1, double beta2,
                         int K) {
  if (K < 2) throw std::invalid_argument("symbol: truncation length must be >= 2");
  SymbolTerms t;
  t.ga = frac_coeffs(alpha, K);
  t.gb1 = frac_coeffs(beta1, K + 1);
  t.gb2 = frac_coeffs(beta2, K + 1);
  t.s1 = -scals.nu1 / (2.0 * std::cos(beta1 * std::numbers::pi / 2.0));
  t.s2 = -scals.nu2 / (2.0 * std::cos(beta2 * std::numbers::pi / 2.0));
  t.nu3 = scals.nu3;
  return t;
}

}  // namespace

fft::Complex symbol_eval(const std::array<double, 3>& theta, const ScalingConstants& scals,
                         double alpha, double beta1, double beta2, int K) {
  const SymbolTerms t = symbol_terms(scals, alpha, beta1, beta2, K);
  fft::Complex phi = 0.0;
  for (int k = 0; k < K; ++k)
    phi += t.nu3 * t.ga[k] * std::polar(1.0, k * theta[2]);
  for (int k = -1; k < K; ++k) {
    const fft::Complex e1 = std::polar(1.0, k * theta[0]) + std::polar(1.0, -k * theta[0]);
    const fft::Complex e2 = std::polar(1.0, k * theta[1]) + std::polar(1.0, -k * theta[1]);
    phi -= t.s1 * t.gb1[k + 1] * e1 + t.s2 * t.gb2[k + 1] * e2;
  }
  return phi;
}

double symbol_coeff_abs_sum(const ScalingConstants& scals, double alpha, double beta1,
                            double beta2, int K) {
  const SymbolTerms t = symbol_terms(scals, alpha, beta1, beta2, K);
  double acc = 0.0;
  for (int k = 0; k < K; ++k) acc += t.nu3 * std::abs(t.ga[k]);
  // Each spatial term carries two exponential copies.
  for (int k = -1; k < K; ++k)
    acc += 2.0 * (std::abs(t.s1) * std::abs(t.gb1[k + 1]) + std::abs(t.s2) * std::abs(t.gb2[k + 1]));
  return acc;
}

double wiener_bound(const ScalingConstants& scals, double beta1, double beta2) {
  const double c1 = std::abs(std::cos(beta1 * std::numbers::pi / 2.0));
  const double c2 = std::abs(std::cos(beta2 * std::numbers::pi / 2.0));
  return 2.0 * scals.nu3 + 2.0 * scals.nu1 * beta1 / c1 + 2.0 * scals.nu2 * beta2 / c2;
}

double ClusteringReport::fraction_within(double eps) const {
  if (eigs.empty()) return 0.0;
  std::size_t in = 0;
  for (double e : eigs)
    if (e >= 1.0 - eps && e <= 1.0 + eps) ++in;
  return static_cast<double>(in) / eigs.size();
}

}  // namespace fdeopt
