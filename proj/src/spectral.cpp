#include "straintomo/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <numbers>

namespace straintomo {
namespace {

// Owns an FFTW buffer pair and the forward/backward r2c/c2r plans.
class RealFft2D {
 public:
  RealFft2D(int rows, int cols)
      : rows_(rows), cols_(cols), half_(cols / 2 + 1) {
    real_ = fftw_alloc_real(static_cast<std::size_t>(rows) * cols);
    spec_ = fftw_alloc_complex(static_cast<std::size_t>(rows) * half_);
    forward_ = fftw_plan_dft_r2c_2d(rows, cols, real_, spec_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_2d(rows, cols, spec_, real_, FFTW_ESTIMATE);
  }
  RealFft2D(const RealFft2D&) = delete;
  RealFft2D& operator=(const RealFft2D&) = delete;
  ~RealFft2D() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_);
    fftw_free(spec_);
  }

  double* real() { return real_; }
  std::complex<double>* spectrum() { return reinterpret_cast<std::complex<double>*>(spec_); }
  void forward() { fftw_execute(forward_); }
  void backward() { fftw_execute(backward_); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int half() const { return half_; }

 private:
  int rows_;
  int cols_;
  int half_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan forward_;
  fftw_plan backward_;
};

// Angular wavenumber for DFT index m of an n-point canvas with spacing h.
double wavenumber(int m, int n, double h) {
  if (n % 2 == 0 && m == n / 2) return 0.0;
  const int signed_m = (m <= n / 2) ? m : m - n;
  return 2.0 * std::numbers::pi * signed_m / (n * h);
}

}  // namespace

std::vector<double> fourier_derivative(const Grid2& grid, std::span<const double> field,
                                       Axis axis, FftPadding padding) {
  if (field.size() != grid.size()) {
    throw Error("fourier_derivative: field size does not match grid");
  }
  const int nx = grid.nx();
  const int ny = grid.ny();
  const int factor = padding == FftPadding::zero_pad ? 2 : 1;
  RealFft2D fft(factor * ny, factor * nx);

  double* canvas = fft.real();
  std::fill(canvas, canvas + static_cast<std::size_t>(fft.rows()) * fft.cols(), 0.0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      canvas[static_cast<std::size_t>(j) * fft.cols() + i] = field[grid.index(i, j)];
    }
  }
  fft.forward();

  std::complex<double>* spec = fft.spectrum();
  const std::complex<double> I(0.0, 1.0);
  const double scale = 1.0 / (static_cast<double>(fft.rows()) * fft.cols());
  for (int r = 0; r < fft.rows(); ++r) {
    const double ky = wavenumber(r, fft.rows(), grid.hy());
    for (int c = 0; c < fft.half(); ++c) {
      const double kx = wavenumber(c, fft.cols(), grid.hx());
      const double k = axis == Axis::x1 ? kx : ky;
      spec[static_cast<std::size_t>(r) * fft.half() + c] *= I * k * scale;
    }
  }
  fft.backward();

  std::vector<double> out(grid.size());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      out[grid.index(i, j)] = canvas[static_cast<std::size_t>(j) * fft.cols() + i];
    }
  }
  return out;
}

}  // namespace straintomo
