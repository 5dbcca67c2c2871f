#pragma once

#include <complex>
#include <vector>

namespace fdeopt::fft {

using Complex = std::complex<double>;

/// Batched 1D real<->complex transforms of fixed geometry: `rows` contiguous
/// rows of length `len`. forward() fills `rows` half-spectra of len/2+1 bins;
/// inverse() is unnormalized (scale by 1/len to invert) and destroys its
/// complex input, as usual for c2r transforms.
class BatchedRealFft {
public:
  BatchedRealFft(int len, int rows);
  ~BatchedRealFft();
  BatchedRealFft(const BatchedRealFft&) = delete;
  BatchedRealFft& operator=(const BatchedRealFft&) = delete;
  BatchedRealFft(BatchedRealFft&& other) noexcept;
  BatchedRealFft& operator=(BatchedRealFft&& other) noexcept;

  void forward(double* in, Complex* out) const;
  void inverse(Complex* in, double* out) const;

  int len() const { return len_; }
  int rows() const { return rows_; }
  int spec_len() const { return len_ / 2 + 1; }

private:
  int len_ = 0, rows_ = 0;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
};

/// In-place complex 3D transform on an n x n x n tensor (row-major).
/// forward() uses the e^{-i...} sign convention; inverse() is unnormalized.
class Fft3D {
public:
  explicit Fft3D(int n);
  ~Fft3D();
  Fft3D(const Fft3D&) = delete;
  Fft3D& operator=(const Fft3D&) = delete;
  Fft3D(Fft3D&& other) noexcept;
  Fft3D& operator=(Fft3D&& other) noexcept;

  void forward(Complex* data) const;
  void inverse(Complex* data) const;
  int n() const { return n_; }

private:
  int n_ = 0;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
};

/// One-shot 1D complex DFT: X_j = sum_k x_k e^{-2 pi i jk/n} (forward);
/// the inverse flips the sign and divides by n.
std::vector<Complex> dft(const std::vector<Complex>& x, bool inverse = false);

}  // namespace fdeopt::fft
