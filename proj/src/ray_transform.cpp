#include "straintomo/ray_transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <numbers>
#include <random>

namespace straintomo {
namespace {

constexpr double kPi = std::numbers::pi;

// Parameter interval where the line p0 + t * dir lies inside [lo, hi]^2.
bool clip_to_box(Vec2 p0, Vec2 dir, Vec2 lo, Vec2 hi, double& t0, double& t1) {
  t0 = -INFINITY;
  t1 = INFINITY;
  const double p[2] = {p0.x, p0.y};
  const double d[2] = {dir.x, dir.y};
  const double l[2] = {lo.x, lo.y};
  const double h[2] = {hi.x, hi.y};
  for (int k = 0; k < 2; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (p[k] < l[k] || p[k] > h[k]) return false;
      continue;
    }
    double a = (l[k] - p[k]) / d[k];
    double b = (h[k] - p[k]) / d[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return t1 > t0;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

ScanGeometry ScanGeometry::covering(double radius, int n_angles, double ray_spacing,
                                    double angle_span, double angle_start) {
  ScanGeometry g;
  g.n_angles = n_angles;
  g.angle_start = angle_start;
  g.angle_span = angle_span;
  g.ray_spacing = ray_spacing;
  const int half = static_cast<int>(std::ceil(radius / ray_spacing - 1e-9));
  g.n_rays = 2 * half + 1;
  g.s_min = -half * ray_spacing;
  g.validate();
  return g;
}

void ScanGeometry::validate() const {
  if (n_angles < 1) throw Error("scan geometry: n_angles must be at least 1");
  if (n_rays < 1) throw Error("scan geometry: n_rays must be at least 1");
  if (!(ray_spacing > 0.0)) throw Error("scan geometry: ray_spacing must be positive");
  if (!(angle_span > 0.0)) throw Error("scan geometry: angle_span must be positive");
  if (!std::isfinite(angle_start) || !std::isfinite(s_min)) {
    throw Error("scan geometry: non-finite parameters");
  }
}

double ScanGeometry::covered_radius() const { return std::min(-s_min, s_max()); }

Sinogram operator-(const Sinogram& lhs, const Sinogram& rhs) {
  if (!(lhs.geometry == rhs.geometry)) {
    throw Error("sinogram difference: geometries differ");
  }
  Sinogram out(lhs.geometry);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] = lhs.values[k] - rhs.values[k];
  }
  return out;
}

double l2_norm(const Sinogram& sino) {
  double sum = 0.0;
  for (double v : sino.values) sum += v * v;
  return std::sqrt(sum);
}

Sinogram lrt_forward(const SymTensorField2& field, const ScanGeometry& geom) {
  geom.validate();
  field.validate();
  const Grid2& grid = field.grid;

  double support = 0.0;
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const std::size_t k = grid.index(i, j);
      if (field.e11[k] != 0.0 || field.e12[k] != 0.0 || field.e22[k] != 0.0) {
        support = std::max(support, norm(grid.centre(i, j)));
      }
    }
  }
  if (support > geom.covered_radius() + 1e-9) {
    throw Error("lrt_forward: scan geometry does not cover the field support (support radius " +
                std::to_string(support) + ", covered " + std::to_string(geom.covered_radius()) +
                ")");
  }

  Sinogram sino(geom);
  const double dt = 0.5 * std::min(grid.hx(), grid.hy());
  const Vec2 lo{grid.xmin() - 0.5 * grid.hx(), grid.ymin() - 0.5 * grid.hy()};
  const Vec2 hi{grid.xmax() + 0.5 * grid.hx(), grid.ymax() + 0.5 * grid.hy()};
  std::vector<double> projected(grid.size());

  for (int a = 0; a < geom.n_angles; ++a) {
    const double theta = geom.angle(a);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      projected[k] = c * c * field.e11[k] + 2.0 * c * s * field.e12[k] + s * s * field.e22[k];
    }
    const Vec2 xi{c, s};
    const Vec2 normal{-s, c};
    for (int r = 0; r < geom.n_rays; ++r) {
      const Vec2 foot = geom.offset(r) * normal;
      double t0 = 0.0;
      double t1 = 0.0;
      if (!clip_to_box(foot, xi, lo, hi, t0, t1)) continue;
      const long k0 = static_cast<long>(std::ceil(t0 / dt));
      const long k1 = static_cast<long>(std::floor(t1 / dt));
      double sum = 0.0;
      for (long k = k0; k <= k1; ++k) {
        const double t = k * dt;
        sum += sample_bilinear(grid, projected, foot + t * xi);
      }
      sino.at(a, r) = sum * dt;
    }
  }
  return sino;
}

std::vector<double> ramp_filter_canvas(std::span<const double> row, double ray_spacing,
                                       RampWindow window) {
  const std::size_t n = row.size();
  if (n == 0) return {};
  if (!(ray_spacing > 0.0)) throw Error("ramp_filter: ray spacing must be positive");
  const std::size_t len = next_pow2(2 * n);
  const std::size_t half = len / 2 + 1;

  double* canvas = fftw_alloc_real(len);
  fftw_complex* spec = fftw_alloc_complex(half);
  fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(len), canvas, spec, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_c2r_1d(static_cast<int>(len), spec, canvas, FFTW_ESTIMATE);

  std::copy(row.begin(), row.end(), canvas);
  const std::size_t pad = len - n;
  for (std::size_t k = 0; k < pad; ++k) {
    canvas[n + k] = k < pad / 2 ? row[n - 1] : row[0];
  }
  fftw_execute(fwd);

  auto* z = reinterpret_cast<std::complex<double>*>(spec);
  const double dk = 2.0 * kPi / (static_cast<double>(len) * ray_spacing);
  for (std::size_t m = 0; m < half; ++m) {
    double gain = dk * static_cast<double>(m);
    if (window == RampWindow::cosine) {
      gain *= std::cos(kPi * static_cast<double>(m) / static_cast<double>(len));
    }
    z[m] *= gain / static_cast<double>(len);
  }
  z[0] = 0.0;
  fftw_execute(bwd);

  std::vector<double> out(canvas, canvas + len);
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  fftw_free(canvas);
  fftw_free(spec);
  return out;
}

std::vector<double> ramp_filter(std::span<const double> row, double ray_spacing,
                                RampWindow window) {
  std::vector<double> canvas = ramp_filter_canvas(row, ray_spacing, window);
  canvas.resize(row.size());
  return canvas;
}

SymTensorField2 invert_solenoidal_2d(const Sinogram& sino, const Grid2& grid,
                                     RampWindow window) {
  const ScanGeometry& geom = sino.geometry;
  geom.validate();
  if (sino.values.size() != static_cast<std::size_t>(geom.n_angles) * geom.n_rays) {
    throw Error("invert_solenoidal_2d: sinogram size does not match its geometry");
  }
  const double needed = std::hypot(std::max(std::abs(grid.xmin() + 0.5 * grid.hx()),
                                            std::abs(grid.xmax() - 0.5 * grid.hx())),
                                   std::max(std::abs(grid.ymin() + 0.5 * grid.hy()),
                                            std::abs(grid.ymax() - 0.5 * grid.hy())));
  if (geom.covered_radius() + geom.ray_spacing < needed) {
    throw Error("invert_solenoidal_2d: scan geometry does not cover the grid");
  }
  if (geom.angle_span < kPi - 1e-12) {
    std::clog << "warning: invert_solenoidal_2d: angular coverage below pi radians; "
                 "reconstruction is incomplete\n";
  }

  SymTensorField2 out(grid);
  const double scale = geom.angle_span / geom.n_angles / (4.0 * kPi);
  std::vector<double> xs(static_cast<std::size_t>(grid.nx()));
  for (int i = 0; i < grid.nx(); ++i) xs[static_cast<std::size_t>(i)] = grid.x(i);

  for (int a = 0; a < geom.n_angles; ++a) {
    const std::vector<double> q = ramp_filter(sino.row(a), geom.ray_spacing, window);
    const double theta = geom.angle(a);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double w11 = scale * c * c;
    const double w12 = scale * c * s;
    const double w22 = scale * s * s;
    for (int j = 0; j < grid.ny(); ++j) {
      const double yc = grid.y(j) * c;
      for (int i = 0; i < grid.nx(); ++i) {
        const double offset = -xs[static_cast<std::size_t>(i)] * s + yc;
        const double f = (offset - geom.s_min) / geom.ray_spacing;
        const double fl = std::floor(f);
        const long r0 = static_cast<long>(fl);
        if (r0 < -1 || r0 >= geom.n_rays) continue;
        const double w = f - fl;
        const double v0 = r0 >= 0 ? q[static_cast<std::size_t>(r0)] : 0.0;
        const double v1 = r0 + 1 < geom.n_rays ? q[static_cast<std::size_t>(r0 + 1)] : 0.0;
        const double value = (1.0 - w) * v0 + w * v1;
        const std::size_t k = grid.index(i, j);
        out.e11[k] += w11 * value;
        out.e12[k] += w12 * value;
        out.e22[k] += w22 * value;
      }
    }
  }
  return out;
}

Sinogram add_noise(const Sinogram& sino, double level, std::uint64_t seed) {
  if (!(level >= 0.0)) throw Error("add_noise: level must be non-negative");
  Sinogram out = sino;
  if (level == 0.0 || sino.values.empty()) return out;
  double mean_abs = 0.0;
  for (double v : sino.values) mean_abs += std::abs(v);
  mean_abs /= static_cast<double>(sino.values.size());
  const double sigma = level * mean_abs;
  if (sigma == 0.0) return out;

  const auto lo = static_cast<std::uint32_t>(seed & 0xffffffffu);
  const auto hi = static_cast<std::uint32_t>(seed >> 32);
  for (int a = 0; a < sino.geometry.n_angles; ++a) {
    std::seed_seq seq{lo, hi, static_cast<std::uint32_t>(a)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal(0.0, sigma);
    for (int r = 0; r < sino.geometry.n_rays; ++r) out.at(a, r) += normal(engine);
  }
  return out;
}

}  // namespace straintomo
