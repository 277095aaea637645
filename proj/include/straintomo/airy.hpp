#pragma once

#include "straintomo/elastic.hpp"
#include "straintomo/polyline.hpp"

namespace straintomo {

/// Stress components (s11, s12, s22) at one point.
struct StressSample {
  double s11;
  double s12;
  double s22;
};

/// Closed-form Airy stress for the potential
///   phi(x1, x2) = x1 sin(3 x1 x2^2) exp(x1 x2^2) + x2 cos(x1^3):
///   s11 = d2phi/dx2^2, s22 = d2phi/dx1^2, s12 = -d2phi/dx1dx2.
StressSample airy_stress(double x1, double x2);

struct AiryPhantom {
  SymTensorField2 stress;
  SymTensorField2 strain;
};

/// Masked Airy stress on the grid and its Hooke strain.
AiryPhantom airy_phantom(const Grid2& grid, const BoundaryPolyline& boundary,
                         const ElasticConstants& constants);

}  // namespace straintomo
