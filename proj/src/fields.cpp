#include "straintomo/fields.hpp"

#include <algorithm>
#include <cmath>

namespace straintomo {
namespace {

void check_component(const std::vector<double>& c, std::size_t n, const char* what) {
  if (c.size() != n) {
    throw Error(std::string(what) + ": component size does not match grid");
  }
  for (double v : c) {
    if (!std::isfinite(v)) {
      throw Error(std::string(what) + ": non-finite value");
    }
  }
}

void require_same_grid(const Grid2& a, const Grid2& b, const char* what) {
  if (!(a == b)) {
    throw Error(std::string(what) + ": fields are on different grids");
  }
}

}  // namespace

void SymTensorField2::validate() const {
  check_component(e11, grid.size(), "tensor field");
  check_component(e12, grid.size(), "tensor field");
  check_component(e22, grid.size(), "tensor field");
}

void VectorField2::validate() const {
  check_component(u1, grid.size(), "vector field");
  check_component(u2, grid.size(), "vector field");
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), 1));
}

SymTensorField2 mask_field(const SymTensorField2& field, const Mask& mask) {
  require_same_grid(field.grid, mask.grid, "mask_field");
  SymTensorField2 out(field.grid);
  for (std::size_t k = 0; k < field.grid.size(); ++k) {
    if (mask.inside[k]) {
      out.e11[k] = field.e11[k];
      out.e12[k] = field.e12[k];
      out.e22[k] = field.e22[k];
    }
  }
  return out;
}

double relative_error(const SymTensorField2& recon, const SymTensorField2& truth,
                      const Mask& mask) {
  require_same_grid(recon.grid, truth.grid, "relative_error");
  require_same_grid(recon.grid, mask.grid, "relative_error");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < truth.grid.size(); ++k) {
    if (!mask.inside[k]) continue;
    num += frobenius(recon.e11[k] - truth.e11[k], recon.e12[k] - truth.e12[k],
                     recon.e22[k] - truth.e22[k]);
    den += frobenius(truth.e11[k], truth.e12[k], truth.e22[k]);
  }
  if (!(den > 0.0)) {
    throw Error("relative_error: reference field has zero norm on the mask");
  }
  return num / den;
}

double sample_bilinear(const Grid2& grid, std::span<const double> values, Vec2 p) {
  const double fx = (p.x - grid.xmin()) / grid.hx() - 0.5;
  const double fy = (p.y - grid.ymin()) / grid.hy() - 0.5;
  const double flx = std::floor(fx);
  const double fly = std::floor(fy);
  const int i0 = static_cast<int>(flx);
  const int j0 = static_cast<int>(fly);
  if (i0 < -1 || j0 < -1 || i0 >= grid.nx() || j0 >= grid.ny()) return 0.0;
  const double wx = fx - flx;
  const double wy = fy - fly;
  auto at = [&](int i, int j) -> double {
    if (i < 0 || j < 0 || i >= grid.nx() || j >= grid.ny()) return 0.0;
    return values[grid.index(i, j)];
  };
  return (1.0 - wy) * ((1.0 - wx) * at(i0, j0) + wx * at(i0 + 1, j0)) +
         wy * ((1.0 - wx) * at(i0, j0 + 1) + wx * at(i0 + 1, j0 + 1));
}

}  // namespace straintomo
