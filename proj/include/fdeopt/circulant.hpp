#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fdeopt/fft.hpp"
#include "fdeopt/problem.hpp"
#include "fdeopt/toeplitz.hpp"

namespace fdeopt {

/// A circulant matrix C[i][j] = c_{(i-j) mod n} with its eigenvalues
/// lambda_j = sum_k c_k e^{-2 pi i jk/n} (C x_j = lambda_j x_j for the
/// Fourier vectors x_j with entries e^{2 pi i jk/n}).
struct CirculantSpec1D {
  std::vector<double> first_col;
  std::vector<fft::Complex> eigs;
};

/// T. Chan optimal circulant approximation: the Frobenius-nearest circulant,
/// c_i = ((n-i) t_i + i t_{-n+i}) / n.
CirculantSpec1D tchan(const ToeplitzSpec1D& spec);

std::vector<fft::Complex> circulant_eigs(std::span<const double> first_col);

/// Eigenvalues of the 3-level T. Chan approximation C3(B) and of the circulant
/// Schur-complement approximation S~ = rho(1 + 1/delta) I + C3(B)^T C3(B)/m2
/// with m2 = (rho(gamma/psi^2 + 1/delta))^{-1} + delta/rho.
class CirculantPreconditioner {
public:
  CirculantPreconditioner(std::vector<fft::Complex> lam_b, double rho, double delta, double gamma,
                          double psi, int n);

  struct Workspace {
    std::vector<fft::Complex> freq;
    std::size_t bytes() const { return freq.capacity() * sizeof(fft::Complex); }
  };
  Workspace make_workspace() const;

  /// z = S~^{-1} r via forward 3D DFT, division by lam_S, inverse 3D DFT.
  void solve(std::span<const double> r, std::span<double> z, Workspace& ws) const;
  std::vector<double> solve(std::span<const double> r) const;

  const std::vector<fft::Complex>& lam_b() const { return lam_b_; }
  const std::vector<double>& lam_s() const { return lam_s_; }
  double rho() const { return rho_; }
  double delta() const { return delta_; }
  double gamma() const { return gamma_; }
  double psi() const { return psi_; }
  int n() const { return n_; }
  std::size_t size() const { return lam_s_.size(); }

private:
  int n_;
  double rho_, delta_, gamma_, psi_;
  std::vector<fft::Complex> lam_b_;
  std::vector<double> lam_s_;
  fft::Fft3D fft3_;
};

CirculantPreconditioner assemble_precond(const ConstraintOperator& op, double rho, double delta,
                                         double gamma);

/// Partial sum of the generating symbol of B with both series truncated at K
/// terms (time k = 0..K-1, space k = -1..K-1).
fft::Complex symbol_eval(const std::array<double, 3>& theta, const ScalingConstants& scals,
                         double alpha, double beta1, double beta2, int K);

/// Truncated absolute coefficient sum of the symbol (same truncation).
double symbol_coeff_abs_sum(const ScalingConstants& scals, double alpha, double beta1,
                            double beta2, int K);

/// Closed-form Wiener-class bound 2 nu3 + 2 nu1 beta1/|cos(beta1 pi/2)|
/// + 2 nu2 beta2/|cos(beta2 pi/2)|.
double wiener_bound(const ScalingConstants& scals, double beta1, double beta2);

/// Dense spectral diagnostic of the preconditioned normal-equations matrix
/// S~^{-1} S at small n; observational (positivity is the only guarantee).
struct ClusteringReport {
  std::vector<double> eigs;  // ascending
  double min_eig, max_eig;
  double fraction_within(double eps) const;
};

ClusteringReport clustering_report(const ConstraintOperator& op,
                                   const CirculantPreconditioner& pc, int n_max = 6);

}  // namespace fdeopt
