#include "straintomo/elastic.hpp"

#include <cmath>

namespace straintomo {

void ElasticConstants::validate() const {
  if (!(E > 0.0) || !std::isfinite(E)) {
    throw Error("elastic constants: Young's modulus must be positive");
  }
  if (!(nu > -1.0 && nu < 0.5)) {
    throw Error("elastic constants: Poisson's ratio must lie in (-1, 0.5)");
  }
}

PlaneStiffness plane_stiffness(const ElasticConstants& k) {
  k.validate();
  const double g = k.E / (1.0 + k.nu);
  if (k.regime == ElasticRegime::plane_stress) {
    const double a = k.E / (1.0 - k.nu * k.nu);
    return {a, k.nu * a, g};
  }
  const double lambda = k.E * k.nu / ((1.0 + k.nu) * (1.0 - 2.0 * k.nu));
  return {lambda + g, lambda, g};
}

SymTensorField2 hooke_stress_to_strain(const SymTensorField2& stress,
                                       const ElasticConstants& k) {
  k.validate();
  SymTensorField2 strain(stress.grid);
  const double E = k.E;
  const double nu = k.nu;
  for (std::size_t p = 0; p < stress.grid.size(); ++p) {
    const double s11 = stress.e11[p];
    const double s22 = stress.e22[p];
    if (k.regime == ElasticRegime::plane_stress) {
      strain.e11[p] = (s11 - nu * s22) / E;
      strain.e22[p] = (-nu * s11 + s22) / E;
    } else {
      strain.e11[p] = (1.0 + nu) * ((1.0 - nu) * s11 - nu * s22) / E;
      strain.e22[p] = (1.0 + nu) * ((1.0 - nu) * s22 - nu * s11) / E;
    }
    strain.e12[p] = (1.0 + nu) * stress.e12[p] / E;
  }
  return strain;
}

SymTensorField2 hooke_strain_to_stress(const SymTensorField2& strain,
                                       const ElasticConstants& k) {
  const PlaneStiffness c = plane_stiffness(k);
  SymTensorField2 stress(strain.grid);
  for (std::size_t p = 0; p < strain.grid.size(); ++p) {
    stress.e11[p] = c.a * strain.e11[p] + c.c * strain.e22[p];
    stress.e22[p] = c.c * strain.e11[p] + c.a * strain.e22[p];
    stress.e12[p] = c.g * strain.e12[p];
  }
  return stress;
}

VectorField2 body_force_rhs(const SymTensorField2& s_eps, const ElasticConstants& k,
                            FftPadding padding) {
  const PlaneStiffness c = plane_stiffness(k);
  const Grid2& g = s_eps.grid;
  const auto d11_1 = fourier_derivative(g, s_eps.e11, Axis::x1, padding);
  const auto d11_2 = fourier_derivative(g, s_eps.e11, Axis::x2, padding);
  const auto d22_1 = fourier_derivative(g, s_eps.e22, Axis::x1, padding);
  const auto d22_2 = fourier_derivative(g, s_eps.e22, Axis::x2, padding);
  const auto d12_1 = fourier_derivative(g, s_eps.e12, Axis::x1, padding);
  const auto d12_2 = fourier_derivative(g, s_eps.e12, Axis::x2, padding);

  VectorField2 b(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    b.u1[p] = -(c.a * d11_1[p] + c.c * d22_1[p] + c.g * d12_2[p]);
    b.u2[p] = -(c.c * d11_2[p] + c.a * d22_2[p] + c.g * d12_1[p]);
  }
  return b;
}

}  // namespace straintomo
