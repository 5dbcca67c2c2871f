#include "fdeopt/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace fdeopt::fft {

namespace {

// FFTW plan creation/destruction is not thread safe; execution via the
// new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

fftw_complex* cast(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

BatchedRealFft::BatchedRealFft(int len, int rows) : len_(len), rows_(rows) {
  if (len <= 0 || rows <= 0) throw std::invalid_argument("BatchedRealFft: bad geometry");
  std::vector<double> rbuf(static_cast<std::size_t>(rows) * len);
  std::vector<Complex> cbuf(static_cast<std::size_t>(rows) * spec_len());
  std::lock_guard lock(planner_mutex());
  int dims[1] = {len};
  fwd_ = fftw_plan_many_dft_r2c(1, dims, rows, rbuf.data(), nullptr, 1, len,
                                cast(cbuf.data()), nullptr, 1, spec_len(), kFlags);
  inv_ = fftw_plan_many_dft_c2r(1, dims, rows, cast(cbuf.data()), nullptr, 1, spec_len(),
                                rbuf.data(), nullptr, 1, len, kFlags);
  if (!fwd_ || !inv_) throw std::runtime_error("BatchedRealFft: planning failed");
}

BatchedRealFft::~BatchedRealFft() {
  if (fwd_ || inv_) {
    std::lock_guard lock(planner_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  }
}

BatchedRealFft::BatchedRealFft(BatchedRealFft&& other) noexcept
    : len_(other.len_), rows_(other.rows_), fwd_(other.fwd_), inv_(other.inv_) {
  other.fwd_ = other.inv_ = nullptr;
}

BatchedRealFft& BatchedRealFft::operator=(BatchedRealFft&& other) noexcept {
  if (this != &other) {
    this->~BatchedRealFft();
    len_ = other.len_;
    rows_ = other.rows_;
    fwd_ = other.fwd_;
    inv_ = other.inv_;
    other.fwd_ = other.inv_ = nullptr;
  }
  return *this;
}

void BatchedRealFft::forward(double* in, Complex* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), in, cast(out));
}

void BatchedRealFft::inverse(Complex* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_), cast(in), out);
}

Fft3D::Fft3D(int n) : n_(n) {
  if (n <= 0) throw std::invalid_argument("Fft3D: bad size");
  std::vector<Complex> buf(static_cast<std::size_t>(n) * n * n);
  std::lock_guard lock(planner_mutex());
  fwd_ = fftw_plan_dft_3d(n, n, n, cast(buf.data()), cast(buf.data()), FFTW_FORWARD, kFlags);
  inv_ = fftw_plan_dft_3d(n, n, n, cast(buf.data()), cast(buf.data()), FFTW_BACKWARD, kFlags);
  if (!fwd_ || !inv_) throw std::runtime_error("Fft3D: planning failed");
}

Fft3D::~Fft3D() {
  if (fwd_ || inv_) {
    std::lock_guard lock(planner_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  }
}

Fft3D::Fft3D(Fft3D&& other) noexcept : n_(other.n_), fwd_(other.fwd_), inv_(other.inv_) {
  other.fwd_ = other.inv_ = nullptr;
}

Fft3D& Fft3D::operator=(Fft3D&& other) noexcept {
  if (this != &other) {
    this->~Fft3D();
    n_ = other.n_;
    fwd_ = other.fwd_;
    inv_ = other.inv_;
    other.fwd_ = other.inv_ = nullptr;
  }
  return *this;
}

void Fft3D::forward(Complex* data) const {
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), cast(data), cast(data));
}

void Fft3D::inverse(Complex* data) const {
  fftw_execute_dft(static_cast<fftw_plan>(inv_), cast(data), cast(data));
}

std::vector<Complex> dft(const std::vector<Complex>& x, bool inverse) {
  const int n = static_cast<int>(x.size());
  if (n == 0) throw std::invalid_argument("dft: empty input");
  std::vector<Complex> in(x), out(x.size());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, cast(in.data()), cast(out.data()),
                            inverse ? FFTW_BACKWARD : FFTW_FORWARD, kFlags);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  if (inverse) {
    for (auto& v : out) v /= static_cast<double>(n);
  }
  return out;
}

}  // namespace fdeopt::fft
