#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <span>
#include <vector>

#include "straintomo/polyline.hpp"
#include "straintomo/ray_transform.hpp"

namespace straintomo {

/// Transversal crossing of a ray with boundary segment (i, next(i)).
struct RayHit {
  std::size_t segment = 0;  ///< global index i of the segment's first node
  double alpha = 0.0;       ///< hit = alpha * x_i + (1 - alpha) * x_next
  Vec2 point;
  double t = 0.0;           ///< ray parameter along xi
  bool entering = false;
};

/// All crossings of the line {offset * xi_perp + t * xi} with the boundary,
/// sorted by t, parity alternating from entering.
///
/// Nodes lying exactly on the line are classified as lying on its positive
/// side, which is the limit of shifting the line by a vanishing offset: a
/// line through a node then crosses exactly one of its two segments, and a
/// tangential touch yields a coincident enter/exit pair that cancels. An odd
/// crossing count (only possible for open or malformed loops) discards the
/// ray and sets `*discarded`.
std::vector<RayHit> intersect_ray(double angle, double offset, const BoundaryPolyline& boundary,
                                  bool* discarded = nullptr);

struct RayRow {
  int angle_index = 0;
  int ray_index = 0;
  double angle = 0.0;
  double offset = 0.0;
};

/// Rows A U = R, one per ray that crosses the boundary; columns (2i, 2i+1)
/// hold the two displacement components of global node i.
struct BoundarySystem {
  std::size_t n_nodes = 0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> a;
  Eigen::VectorXd rhs;
  std::vector<RayRow> rows;
  std::size_t dropped_degenerate = 0;
  std::size_t dropped_grazing = 0;
};

/// Assembles the ray/node system. Rays whose total chord inside the domain is
/// shorter than two ray spacings are excluded. R is read from `residual`,
/// which must share `geom`.
BoundarySystem assemble_system(const ScanGeometry& geom, const BoundaryPolyline& boundary,
                               const Sinogram& residual);

/// Same rows with a zero right-hand side (for spectral diagnostics).
BoundarySystem assemble_system(const ScanGeometry& geom, const BoundaryPolyline& boundary);

struct MinNormSolution {
  std::vector<Vec2> displacement;  ///< per global node
  Eigen::VectorXd singular_values;
  std::size_t rank = 0;
};

/// Pseudoinverse solution; singular values below cutoff * sigma_max are
/// treated as zero.
MinNormSolution min_norm_solve(const BoundarySystem& system, double cutoff = 1e-10);

struct SvdReport {
  Eigen::VectorXd singular_values;  ///< descending
  std::size_t near_zero = 0;        ///< count below 1e-10 * sigma_max
  /// Right singular vectors of the near-zero group, one nodal field each.
  std::vector<std::vector<Vec2>> null_vectors;
  /// sigma_max / smallest singular value above the near-zero threshold.
  double condition_number = 0.0;
};

inline constexpr double kNearZeroRelative = 1e-10;

SvdReport svd_report(const BoundarySystem& system, bool with_vectors = true);

/// Infinitesimal rigid motion (c1 - y beta, c2 + x beta) at every node, or at
/// the nodes of one component (zero elsewhere) when `component` is given.
std::vector<Vec2> rigid_motion_nodes(const BoundaryPolyline& boundary, double c1, double c2,
                                     double beta, int component = -1);

Eigen::VectorXd to_unknowns(std::span<const Vec2> nodal);
std::vector<Vec2> from_unknowns(const Eigen::VectorXd& unknowns);

}  // namespace straintomo
