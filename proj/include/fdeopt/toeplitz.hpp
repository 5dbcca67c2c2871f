#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fdeopt/fft.hpp"
#include "fdeopt/problem.hpp"

namespace fdeopt {

/// Unilevel Toeplitz matrix given by its first column (t_0..t_{n-1}) and
/// first row (t_0, t_{-1}, .., t_{-(n-1)}); T[i][j] = t_{i-j}.
struct ToeplitzSpec1D {
  std::vector<double> col;
  std::vector<double> row;

  int size() const { return static_cast<int>(col.size()); }
};

/// Lower-triangular Caputo factor: column k holds g_k^alpha / h_t^alpha.
ToeplitzSpec1D build_caputo(double alpha, int n, double h_t);

/// Symmetric Riesz factor -1/(2 cos(beta pi/2)) (L^{beta,l} + (L^{beta,l})^T)
/// with L^{beta,l} the 1-shifted Grunwald-Letnikov lower factor / h_x^beta.
/// Rejects beta with |cos(beta pi/2)| < 1e-6 (scale factor diverges).
ToeplitzSpec1D build_riesz(double beta, int n, double h_x);

/// T x (or T^T x) via embedding into a circulant of size 2n; O(n log n).
std::vector<double> toeplitz_matvec(const ToeplitzSpec1D& spec, std::span<const double> x,
                                    bool transpose = false);

/// The scaled 3-level Toeplitz FDE operator
///   B = psi ( C^alpha (x) I  -  I (x) (L^beta1 (x) I + I (x) L^beta2) )
/// held matrix-free: O(n) coefficients plus frequency-domain embeddings of
/// the three 1D factors, precomputed once and reused across all iterations.
class ConstraintOperator {
public:
  ConstraintOperator(const ProblemSpec& spec, const Grid& grid);
  /// Explicit factors (used by validation fault injection and diagnostics).
  ConstraintOperator(ToeplitzSpec1D caputo, ToeplitzSpec1D riesz1, ToeplitzSpec1D riesz2,
                     double psi, int n);
  /// B == 0 diagnostic operator (zero factors, psi = 1).
  static ConstraintOperator zero(int n);

  /// Per-call scratch; one per concurrent apply() caller.
  struct Workspace {
    std::vector<double> rows;        // n^2 x 2n packed fibers
    std::vector<fft::Complex> spec;  // n^2 x (n+1) half spectra
    std::vector<double> mode_out;    // length-N accumulator
    std::size_t bytes() const;
  };
  Workspace make_workspace() const;

  void apply(std::span<const double> x, std::span<double> out, Workspace& ws,
             bool adjoint = false) const;
  std::vector<double> apply(std::span<const double> x, bool adjoint = false) const;

  int n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  double psi() const { return psi_; }
  const ToeplitzSpec1D& caputo() const { return caputo_; }
  const ToeplitzSpec1D& riesz1() const { return riesz1_; }
  const ToeplitzSpec1D& riesz2() const { return riesz2_; }

  /// Bytes held in 1D coefficient/symbol storage (O(n) audit hook).
  std::size_t coefficient_bytes() const;

private:
  void apply_mode(int mode, std::span<const double> x, std::span<double> out, Workspace& ws,
                  const std::vector<fft::Complex>& symbol, double scale) const;

  int n_;
  double psi_;
  ToeplitzSpec1D caputo_, riesz1_, riesz2_;
  std::vector<fft::Complex> sym_time_, sym_time_adj_, sym_riesz1_, sym_riesz2_;
  fft::BatchedRealFft batch_;
};

namespace detail {
/// Half spectrum (length n+1) of the 2n circulant embedding of a spec.
std::vector<fft::Complex> embed_symbol(const ToeplitzSpec1D& spec, bool transpose);
}  // namespace detail

}  // namespace fdeopt
