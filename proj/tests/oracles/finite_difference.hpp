#pragma once

// Fourth-order central differences on interior grid points.

#include <span>
#include <vector>

#include "straintomo/grid.hpp"

namespace oracle {

/// d/dx (axis 1) or d/dy (axis 2); the two outermost rows/columns are left 0.
inline std::vector<double> fd4(const straintomo::Grid2& g, std::span<const double> f, int axis) {
  std::vector<double> out(g.size(), 0.0);
  const double h = axis == 1 ? g.hx() : g.hy();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const int c = axis == 1 ? i : j;
      const int n = axis == 1 ? g.nx() : g.ny();
      if (c < 2 || c > n - 3) continue;
      auto at = [&](int o) {
        return axis == 1 ? f[g.index(i + o, j)] : f[g.index(i, j + o)];
      };
      out[g.index(i, j)] = (at(-2) - 8 * at(-1) + 8 * at(1) - at(2)) / (12 * h);
    }
  }
  return out;
}

/// Second-order central difference at a point for a callable f(x, y).
template <typename F>
double central(F&& f, double x, double y, int axis, double h) {
  return axis == 1 ? (f(x + h, y) - f(x - h, y)) / (2 * h) : (f(x, y + h) - f(x, y - h)) / (2 * h);
}

}  // namespace oracle
