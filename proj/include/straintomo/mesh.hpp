#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "straintomo/polyline.hpp"

namespace straintomo {

/// Location on a source polyline: (1 - t) * node(segment) + t * node(next).
struct PolylinePosition {
  std::size_t segment = 0;
  double t = 0.0;
};

/// Linear-triangle mesh of a simply connected domain.
struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  ///< counter-clockwise
  std::vector<std::uint8_t> on_boundary;      ///< per vertex
  std::vector<int> boundary_loop;             ///< boundary vertices in loop order
  /// Where each boundary_loop vertex sits on the polyline the mesh came from.
  std::vector<PolylinePosition> boundary_position;

  double triangle_area(std::size_t t) const;
  double total_area() const;
  double median_edge_length() const;
  /// The boundary vertices as a single closed loop, in boundary_loop order.
  BoundaryPolyline boundary_polyline() const;
  /// Throws unless triangles are positively oriented, edges are shared by at
  /// most two triangles, and boundary edges close a single loop.
  void validate() const;
};

/// Delaunay mesh of a single-loop domain with target edge length h.
///
/// The loop is resampled at spacing ~h (corners sharper than 30 degrees are
/// kept), interior points are placed on a hexagonal lattice, and boundary
/// edges missing from the Delaunay triangulation are split at their
/// midpoint along the source polyline until every one is present.
TriMesh mesh_domain(const BoundaryPolyline& boundary, double target_h);

}  // namespace straintomo
