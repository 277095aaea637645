#pragma once

#include <vector>

#include "straintomo/fields.hpp"
#include "straintomo/grid.hpp"

namespace straintomo {

/// One or more closed node loops. Outer boundaries are conventionally
/// counter-clockwise and holes clockwise; the algorithms here only rely on
/// the even-odd rule and do not inspect orientation.
class BoundaryPolyline {
 public:
  using Loop = std::vector<Vec2>;

  BoundaryPolyline() = default;
  explicit BoundaryPolyline(std::vector<Loop> loops);

  const std::vector<Loop>& loops() const { return loops_; }
  std::size_t component_count() const { return loops_.size(); }
  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.back(); }

  /// Global node index of node k in loop c.
  std::size_t global_index(std::size_t c, std::size_t k) const { return offsets_[c] + k; }
  Vec2 node(std::size_t global) const;
  /// Loop that owns a global node index.
  std::size_t component_of(std::size_t global) const;
  /// Global index of the node following `global` in its loop.
  std::size_t next(std::size_t global) const;

  /// Throws if a loop has fewer than three nodes, self-intersects, or
  /// touches another loop.
  void validate() const;

  /// Even-odd containment; points on a segment count as inside.
  bool contains(Vec2 p) const;

  double perimeter() const;

 private:
  std::vector<Loop> loops_;
  std::vector<std::size_t> offsets_;
  double scale_ = 0.0;
};

/// Regular n-gon inscribed in a circle, counter-clockwise unless `hole`.
/// Node k sits at polar angle 2 pi (k + phase) / nodes (negated for holes).
///
/// The default quarter-step phase keeps the polygon's mirror axes off the
/// ray normals of uniform scans whose angle count divides 2n. With a node at
/// angle 0 every chord of such a scan is mirror-symmetric on the node
/// lattice and high-frequency nodal patterns become spurious null vectors
/// of the boundary system (7 extra at 1000 nodes, 500 angles).
BoundaryPolyline::Loop circle_loop(Vec2 centre, double radius, int nodes, bool hole = false,
                                   double phase = 0.25);

BoundaryPolyline make_disk(int nodes, double radius = 1.0);
/// Disk of radius 1 with a concentric circular hole.
BoundaryPolyline make_disk_with_hole(int nodes, double hole_radius = 0.4);
/// Three separate disks of radius 0.4 inside the unit square's neighbourhood.
BoundaryPolyline make_three_disks(int nodes);

/// Characteristic function of the polyline's interior at pixel centres.
Mask make_mask(const Grid2& grid, const BoundaryPolyline& boundary);

}  // namespace straintomo
