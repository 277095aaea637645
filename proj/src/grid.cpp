#include "straintomo/grid.hpp"

#include <algorithm>

namespace straintomo {

Grid2::Grid2(int nx, int ny, double xmin, double xmax, double ymin, double ymax)
    : nx_(nx), ny_(ny), xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax) {
  if (nx < 2 || ny < 2) {
    throw Error("grid: nx and ny must be at least 2");
  }
  if (!(xmax > xmin) || !(ymax > ymin)) {
    throw Error("grid: bounds must satisfy xmax > xmin and ymax > ymin");
  }
}

Grid2 Grid2::square(int n, double extent) {
  return Grid2(n, n, -extent, extent, -extent, extent);
}

double Grid2::circumradius() const {
  const double ax = std::max(std::abs(xmin_), std::abs(xmax_));
  const double ay = std::max(std::abs(ymin_), std::abs(ymax_));
  return std::hypot(ax, ay);
}

}  // namespace straintomo
