#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace straintomo {

/// Thrown when an input violates a documented precondition or file format.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Uniform cell-centred grid over [xmin, xmax] x [ymin, ymax].
///
/// Samples sit at pixel centres; storage is row-major with x varying fastest,
/// so sample (i, j) lives at index j * nx + i.
class Grid2 {
 public:
  Grid2(int nx, int ny, double xmin, double xmax, double ymin, double ymax);

  /// Square grid of n x n pixels over [-extent, extent]^2.
  static Grid2 square(int n, double extent);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double xmin() const { return xmin_; }
  double xmax() const { return xmax_; }
  double ymin() const { return ymin_; }
  double ymax() const { return ymax_; }
  double hx() const { return (xmax_ - xmin_) / nx_; }
  double hy() const { return (ymax_ - ymin_) / ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

  double x(int i) const { return xmin_ + (i + 0.5) * hx(); }
  double y(int j) const { return ymin_ + (j + 0.5) * hy(); }
  Vec2 centre(int i, int j) const { return {x(i), y(j)}; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * nx_ + i;
  }

  /// Radius of the smallest origin-centred circle containing the grid.
  double circumradius() const;

  friend bool operator==(const Grid2&, const Grid2&) = default;

 private:
  int nx_;
  int ny_;
  double xmin_;
  double xmax_;
  double ymin_;
  double ymax_;
};

}  // namespace straintomo
