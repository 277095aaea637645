#include "straintomo/airy.hpp"

#include <cmath>

namespace straintomo {

StressSample airy_stress(double x, double y) {
  // The first term is x g(w) with w = x y^2 and g(w) = sin(3w) exp(w), so
  //   g'  = (3 cos 3w + sin 3w) exp(w)
  //   g'' = (6 cos 3w - 8 sin 3w) exp(w).
  const double w = x * y * y;
  const double ew = std::exp(w);
  const double s3 = std::sin(3.0 * w);
  const double c3 = std::cos(3.0 * w);
  const double g1 = (3.0 * c3 + s3) * ew;
  const double g2 = (6.0 * c3 - 8.0 * s3) * ew;

  const double x2 = x * x;
  const double y2 = y * y;
  const double x3 = x2 * x;
  const double sx3 = std::sin(x3);
  const double cx3 = std::cos(x3);

  const double phi_yy = 2.0 * x2 * g1 + 4.0 * x3 * y2 * g2;
  const double phi_xx = 2.0 * y2 * g1 + x * y2 * y2 * g2 - 6.0 * x * y * sx3 -
                        9.0 * x2 * x2 * y * cx3;
  const double phi_xy = 4.0 * x * y * g1 + 2.0 * x2 * y2 * y * g2 - 3.0 * x2 * sx3;
  return {phi_yy, -phi_xy, phi_xx};
}

AiryPhantom airy_phantom(const Grid2& grid, const BoundaryPolyline& boundary,
                         const ElasticConstants& constants) {
  constants.validate();
  for (const auto& loop : boundary.loops()) {
    for (const Vec2& p : loop) {
      if (p.x <= grid.xmin() || p.x >= grid.xmax() || p.y <= grid.ymin() ||
          p.y >= grid.ymax()) {
        throw Error("airy_phantom: boundary extends outside the grid");
      }
    }
  }
  const Mask mask = make_mask(grid, boundary);
  SymTensorField2 stress(grid);
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const std::size_t k = grid.index(i, j);
      if (!mask.inside[k]) continue;
      const StressSample s = airy_stress(grid.x(i), grid.y(j));
      stress.e11[k] = s.s11;
      stress.e12[k] = s.s12;
      stress.e22[k] = s.s22;
    }
  }
  SymTensorField2 strain = hooke_stress_to_strain(stress, constants);
  return {std::move(stress), std::move(strain)};
}

}  // namespace straintomo
