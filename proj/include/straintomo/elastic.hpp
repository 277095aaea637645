#pragma once

#include "straintomo/fields.hpp"
#include "straintomo/spectral.hpp"

namespace straintomo {

enum class ElasticRegime { plane_stress, plane_strain };

/// Isotropic, homogeneous elastic constants with a 2D reduction.
struct ElasticConstants {
  double E = 1.0;
  double nu = 0.28;
  ElasticRegime regime = ElasticRegime::plane_stress;

  /// Throws unless E > 0 and -1 < nu < 0.5.
  void validate() const;
};

/// In-plane stiffness written as
///   s11 = a e11 + c e22,  s22 = c e11 + a e22,  s12 = g e12,
/// with g = E / (1 + nu) in both regimes.
struct PlaneStiffness {
  double a;
  double c;
  double g;
};

PlaneStiffness plane_stiffness(const ElasticConstants& k);

SymTensorField2 hooke_stress_to_strain(const SymTensorField2& stress,
                                       const ElasticConstants& k);
SymTensorField2 hooke_strain_to_stress(const SymTensorField2& strain,
                                       const ElasticConstants& k);

/// b = -Div(C : s_eps), from spectral derivatives of the unmasked field.
VectorField2 body_force_rhs(const SymTensorField2& s_eps, const ElasticConstants& k,
                            FftPadding padding = FftPadding::zero_pad);

}  // namespace straintomo
