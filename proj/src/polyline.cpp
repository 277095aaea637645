#include "straintomo/polyline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace straintomo {
namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

bool on_segment(Vec2 p, Vec2 a, Vec2 b, double tol) {
  if (p.x < std::min(a.x, b.x) - tol || p.x > std::max(a.x, b.x) + tol ||
      p.y < std::min(a.y, b.y) - tol || p.y > std::max(a.y, b.y) + tol) {
    return false;
  }
  const double len = norm(b - a);
  if (len == 0.0) return norm(p - a) <= tol;
  return std::abs(orient(a, b, p)) / len <= tol;
}

// Closed-segment intersection test, including touching and collinear overlap.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  if (std::max(a.x, b.x) < std::min(c.x, d.x) || std::max(c.x, d.x) < std::min(a.x, b.x) ||
      std::max(a.y, b.y) < std::min(c.y, d.y) || std::max(c.y, d.y) < std::min(a.y, b.y)) {
    return false;
  }
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) &&
      ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) {
    return true;
  }
  return (o1 == 0 && on_segment(c, a, b, 0.0)) || (o2 == 0 && on_segment(d, a, b, 0.0)) ||
         (o3 == 0 && on_segment(a, c, d, 0.0)) || (o4 == 0 && on_segment(b, c, d, 0.0));
}

}  // namespace

BoundaryPolyline::BoundaryPolyline(std::vector<Loop> loops) : loops_(std::move(loops)) {
  offsets_.reserve(loops_.size() + 1);
  offsets_.push_back(0);
  for (const auto& loop : loops_) {
    offsets_.push_back(offsets_.back() + loop.size());
    for (const Vec2& q : loop) scale_ = std::max({scale_, std::abs(q.x), std::abs(q.y)});
  }
}

Vec2 BoundaryPolyline::node(std::size_t global) const {
  const std::size_t c = component_of(global);
  return loops_[c][global - offsets_[c]];
}

std::size_t BoundaryPolyline::component_of(std::size_t global) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

std::size_t BoundaryPolyline::next(std::size_t global) const {
  const std::size_t c = component_of(global);
  const std::size_t local = global - offsets_[c];
  return offsets_[c] + (local + 1) % loops_[c].size();
}

void BoundaryPolyline::validate() const {
  if (loops_.empty()) throw Error("boundary: no loops");
  for (const auto& loop : loops_) {
    if (loop.size() < 3) throw Error("boundary: loop with fewer than 3 nodes");
    for (const Vec2& p : loop) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw Error("boundary: non-finite node coordinate");
      }
    }
  }
  // Pairwise segment test over all loops; adjacent segments share exactly
  // one node and are skipped.
  const std::size_t n = node_count();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = node(i);
    const Vec2 b = node(next(i));
    if (a == b) throw Error("boundary: repeated consecutive node");
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t jn = next(j);
      if (jn == i || next(i) == j) continue;
      if (segments_intersect(a, b, node(j), node(jn))) {
        throw Error(component_of(i) == component_of(j)
                        ? "boundary: loop is self-intersecting"
                        : "boundary: loops intersect each other");
      }
    }
  }
}

bool BoundaryPolyline::contains(Vec2 p) const {
  const double tol = 1e-12 * std::max(scale_, 1.0);
  bool inside = false;
  for (const auto& loop : loops_) {
    const std::size_t m = loop.size();
    for (std::size_t k = 0; k < m; ++k) {
      const Vec2 a = loop[k];
      const Vec2 b = loop[(k + 1) % m];
      if (on_segment(p, a, b, tol)) return true;
      if ((a.y > p.y) != (b.y > p.y)) {
        const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (x > p.x) inside = !inside;
      }
    }
  }
  return inside;
}

double BoundaryPolyline::perimeter() const {
  double total = 0.0;
  for (const auto& loop : loops_) {
    for (std::size_t k = 0; k < loop.size(); ++k) {
      total += norm(loop[(k + 1) % loop.size()] - loop[k]);
    }
  }
  return total;
}

BoundaryPolyline::Loop circle_loop(Vec2 centre, double radius, int nodes, bool hole,
                                   double phase) {
  BoundaryPolyline::Loop loop;
  loop.reserve(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) {
    const double t = 2.0 * std::numbers::pi * (k + phase) / nodes;
    const double angle = hole ? -t : t;
    loop.push_back({centre.x + radius * std::cos(angle), centre.y + radius * std::sin(angle)});
  }
  return loop;
}

BoundaryPolyline make_disk(int nodes, double radius) {
  return BoundaryPolyline({circle_loop({0.0, 0.0}, radius, nodes)});
}

BoundaryPolyline make_disk_with_hole(int nodes, double hole_radius) {
  return BoundaryPolyline({circle_loop({0.0, 0.0}, 1.0, nodes),
                           circle_loop({0.0, 0.0}, hole_radius, nodes, true)});
}

BoundaryPolyline make_three_disks(int nodes) {
  return BoundaryPolyline({circle_loop({-0.55, -0.3}, 0.4, nodes),
                           circle_loop({0.55, -0.3}, 0.4, nodes),
                           circle_loop({0.0, 0.6}, 0.4, nodes)});
}

Mask make_mask(const Grid2& grid, const BoundaryPolyline& boundary) {
  Mask mask(grid);
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const auto& loop : boundary.loops()) {
    for (const Vec2& q : loop) {
      xlo = std::min(xlo, q.x);
      xhi = std::max(xhi, q.x);
      ylo = std::min(ylo, q.y);
      yhi = std::max(yhi, q.y);
    }
  }
  for (int j = 0; j < grid.ny(); ++j) {
    const double y = grid.y(j);
    if (y < ylo || y > yhi) continue;
    for (int i = 0; i < grid.nx(); ++i) {
      const Vec2 p = grid.centre(i, j);
      if (p.x < xlo || p.x > xhi) continue;
      mask.inside[grid.index(i, j)] = boundary.contains(p) ? 1 : 0;
    }
  }
  return mask;
}

}  // namespace straintomo
