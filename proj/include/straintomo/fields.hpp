#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "straintomo/grid.hpp"

namespace straintomo {

/// Symmetric rank-2 tensor field sampled on a grid. Only (11, 12, 22) are
/// stored; the 21 component is the 12 component by construction.
struct SymTensorField2 {
  Grid2 grid;
  std::vector<double> e11;
  std::vector<double> e12;
  std::vector<double> e22;

  explicit SymTensorField2(const Grid2& g)
      : grid(g), e11(g.size(), 0.0), e12(g.size(), 0.0), e22(g.size(), 0.0) {}

  /// Throws unless every component has grid.size() finite entries.
  void validate() const;
};

struct VectorField2 {
  Grid2 grid;
  std::vector<double> u1;
  std::vector<double> u2;

  explicit VectorField2(const Grid2& g)
      : grid(g), u1(g.size(), 0.0), u2(g.size(), 0.0) {}

  void validate() const;
};

/// Characteristic function of a domain evaluated at pixel centres (0 or 1).
struct Mask {
  Grid2 grid;
  std::vector<std::uint8_t> inside;

  explicit Mask(const Grid2& g, std::uint8_t fill = 0)
      : grid(g), inside(g.size(), fill) {}

  std::size_t count() const;
};

SymTensorField2 mask_field(const SymTensorField2& field, const Mask& mask);

/// Pointwise Frobenius norm of a symmetric tensor (e12 counted twice).
inline double frobenius(double e11, double e12, double e22) {
  return std::sqrt(e11 * e11 + 2.0 * e12 * e12 + e22 * e22);
}

/// Masked Riemann-sum ratio sum(chi |recon - truth|_F) / sum(chi |truth|_F).
double relative_error(const SymTensorField2& recon, const SymTensorField2& truth,
                      const Mask& mask);

/// Bilinear interpolation of pixel-centre samples; zero beyond the outermost
/// centres' neighbourhood (values fade linearly over the half-pixel margin).
double sample_bilinear(const Grid2& grid, std::span<const double> values, Vec2 p);

}  // namespace straintomo
