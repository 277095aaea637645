#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "straintomo/fields.hpp"

namespace straintomo {

/// Parallel-beam scan: n_angles directions xi = (cos t, sin t) uniformly
/// spaced over [angle_start, angle_start + angle_span) and n_rays lines per
/// direction at signed offsets s_min + r * ray_spacing along xi_perp =
/// (-sin t, cos t).
struct ScanGeometry {
  int n_angles = 1;
  double angle_start = 0.0;
  double angle_span = 2.0 * std::numbers::pi;
  double ray_spacing = 0.01;
  int n_rays = 1;
  double s_min = 0.0;

  /// Rays centred on the origin that cover a circle of the given radius.
  static ScanGeometry covering(double radius, int n_angles, double ray_spacing,
                               double angle_span = 2.0 * std::numbers::pi,
                               double angle_start = 0.0);

  void validate() const;

  double angle(int a) const { return angle_start + a * angle_span / n_angles; }
  double offset(int r) const { return s_min + r * ray_spacing; }
  double s_max() const { return offset(n_rays - 1); }
  /// Radius of the largest origin-centred disk every direction fully covers.
  double covered_radius() const;

  friend bool operator==(const ScanGeometry&, const ScanGeometry&) = default;
};

/// Longitudinal ray transform samples; values[a * n_rays + r] is the line
/// integral for angle a and ray r.
struct Sinogram {
  ScanGeometry geometry;
  std::vector<double> values;

  explicit Sinogram(const ScanGeometry& g)
      : geometry(g),
        values(static_cast<std::size_t>(g.n_angles) * g.n_rays, 0.0) {}

  double& at(int a, int r) { return values[static_cast<std::size_t>(a) * geometry.n_rays + r]; }
  double at(int a, int r) const {
    return values[static_cast<std::size_t>(a) * geometry.n_rays + r];
  }
  std::span<const double> row(int a) const {
    return std::span<const double>(values).subspan(
        static_cast<std::size_t>(a) * geometry.n_rays, geometry.n_rays);
  }
};

Sinogram operator-(const Sinogram& lhs, const Sinogram& rhs);
/// Euclidean norm of all sinogram samples.
double l2_norm(const Sinogram& sino);

/// Line integrals of xi.eps.xi by ray marching at half the smaller pixel
/// pitch with bilinear interpolation.
Sinogram lrt_forward(const SymTensorField2& field, const ScanGeometry& geom);

/// Optional apodisation applied on top of the |k| response.
enum class RampWindow { none, cosine };

/// Multiplies one projection by |k| (angular wavenumber, rad per length
/// unit) on a canvas at least twice as long, padded with the end values so
/// constants stay constant. The DC term of the canvas spectrum is zeroed.
std::vector<double> ramp_filter(std::span<const double> row, double ray_spacing,
                                RampWindow window = RampWindow::none);

/// Same filter, returning the whole padded canvas instead of the cropped row.
std::vector<double> ramp_filter_canvas(std::span<const double> row, double ray_spacing,
                                       RampWindow window = RampWindow::none);

/// Tensor filtered back-projection of the solenoidal part:
///   s_eps = 1/(4 pi) X* Lambda (xi (x) xi) I eps,
/// with the angular integral discretised as (angle_span / n_angles) * sum.
SymTensorField2 invert_solenoidal_2d(const Sinogram& sino, const Grid2& grid,
                                     RampWindow window = RampWindow::none);

/// Adds i.i.d. N(0, (level * mean|values|)^2) noise. Each projection draws from
/// its own stream seeded by (seed, angle index).
Sinogram add_noise(const Sinogram& sino, double level, std::uint64_t seed);

}  // namespace straintomo
