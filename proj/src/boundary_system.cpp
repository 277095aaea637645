#include "straintomo/boundary_system.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

#include "dense_qr_svd.hpp"

namespace straintomo {
namespace {

// Crossings for one line given the signed node distances d_k = x_k.n - s.
std::vector<RayHit> crossings(const BoundaryPolyline& boundary, std::span<const double> dist,
                              Vec2 xi) {
  std::vector<RayHit> hits;
  const std::size_t n = boundary.node_count();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = boundary.next(i);
    const bool above_i = dist[i] >= 0.0;
    const bool above_j = dist[j] >= 0.0;
    if (above_i == above_j) continue;
    RayHit h;
    h.segment = i;
    h.alpha = dist[j] / (dist[j] - dist[i]);
    const Vec2 xi_node = boundary.node(i);
    const Vec2 xj_node = boundary.node(j);
    h.point = h.alpha * xi_node + (1.0 - h.alpha) * xj_node;
    h.t = dot(h.point, xi);
    hits.push_back(h);
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const RayHit& a, const RayHit& b) { return a.t < b.t; });
  for (std::size_t k = 0; k < hits.size(); ++k) hits[k].entering = (k % 2 == 0);
  return hits;
}

void add_crossing(std::map<std::size_t, double>& row, const BoundaryPolyline& boundary,
                  const RayHit& hit, Vec2 xi, double sign) {
  const std::size_t i = hit.segment;
  const std::size_t j = boundary.next(i);
  const double wi = sign * hit.alpha;
  const double wj = sign * (1.0 - hit.alpha);
  if (wi != 0.0) {
    row[2 * i] += wi * xi.x;
    row[2 * i + 1] += wi * xi.y;
  }
  if (wj != 0.0) {
    row[2 * j] += wj * xi.x;
    row[2 * j + 1] += wj * xi.y;
  }
}

BoundarySystem assemble(const ScanGeometry& geom, const BoundaryPolyline& boundary,
                        const Sinogram* residual) {
  geom.validate();
  boundary.validate();
  if (residual && !(residual->geometry == geom)) {
    throw Error("assemble_system: residual sinogram geometry differs from the scan geometry");
  }
  const std::size_t n_nodes = boundary.node_count();
  BoundarySystem sys;
  sys.n_nodes = n_nodes;

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> rhs;
  std::vector<double> projection(n_nodes);
  std::vector<double> dist(n_nodes);
  std::map<std::size_t, double> row;
  const double min_chord = 2.0 * geom.ray_spacing;

  for (int a = 0; a < geom.n_angles; ++a) {
    const double theta = geom.angle(a);
    const Vec2 xi{std::cos(theta), std::sin(theta)};
    const Vec2 normal{-xi.y, xi.x};
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t k = 0; k < n_nodes; ++k) {
      projection[k] = dot(boundary.node(k), normal);
      lo = std::min(lo, projection[k]);
      hi = std::max(hi, projection[k]);
    }
    for (int r = 0; r < geom.n_rays; ++r) {
      const double s = geom.offset(r);
      if (s < lo || s > hi) continue;
      for (std::size_t k = 0; k < n_nodes; ++k) dist[k] = projection[k] - s;
      std::vector<RayHit> hits = crossings(boundary, dist, xi);
      if (hits.empty()) continue;
      if (hits.size() % 2 != 0) {
        ++sys.dropped_degenerate;
        std::clog << "warning: assemble_system: odd crossing count for angle " << a << " ray "
                  << r << "; ray dropped\n";
        continue;
      }
      double chord = 0.0;
      for (std::size_t k = 0; k < hits.size(); k += 2) chord += hits[k + 1].t - hits[k].t;
      if (chord < min_chord) {
        ++sys.dropped_grazing;
        continue;
      }
      row.clear();
      for (std::size_t k = 0; k < hits.size(); k += 2) {
        add_crossing(row, boundary, hits[k], xi, -1.0);
        add_crossing(row, boundary, hits[k + 1], xi, +1.0);
      }
      const auto row_index = static_cast<int>(sys.rows.size());
      for (const auto& [col, value] : row) {
        if (value != 0.0) triplets.emplace_back(row_index, static_cast<int>(col), value);
      }
      sys.rows.push_back({a, r, theta, s});
      rhs.push_back(residual ? residual->at(a, r) : 0.0);
    }
  }
  if (sys.rows.empty()) {
    throw Error("assemble_system: no ray intersects the boundary");
  }
  sys.a.resize(static_cast<Eigen::Index>(sys.rows.size()),
               static_cast<Eigen::Index>(2 * n_nodes));
  sys.a.setFromTriplets(triplets.begin(), triplets.end());
  sys.rhs = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  return sys;
}

}  // namespace

std::vector<RayHit> intersect_ray(double angle, double offset, const BoundaryPolyline& boundary,
                                  bool* discarded) {
  const Vec2 xi{std::cos(angle), std::sin(angle)};
  const Vec2 normal{-xi.y, xi.x};
  std::vector<double> dist(boundary.node_count());
  for (std::size_t k = 0; k < dist.size(); ++k) dist[k] = dot(boundary.node(k), normal) - offset;
  std::vector<RayHit> hits = crossings(boundary, dist, xi);
  const bool odd = hits.size() % 2 != 0;
  if (odd) {
    std::clog << "warning: intersect_ray: odd crossing count; ray discarded\n";
    hits.clear();
  }
  if (discarded) *discarded = odd;
  return hits;
}

BoundarySystem assemble_system(const ScanGeometry& geom, const BoundaryPolyline& boundary,
                               const Sinogram& residual) {
  return assemble(geom, boundary, &residual);
}

BoundarySystem assemble_system(const ScanGeometry& geom, const BoundaryPolyline& boundary) {
  return assemble(geom, boundary, nullptr);
}

MinNormSolution min_norm_solve(const BoundarySystem& system, double cutoff) {
  if (system.rhs.size() != system.a.rows()) {
    throw Error("min_norm_solve: right-hand side length does not match the system");
  }
  if (!(cutoff >= 0.0)) throw Error("min_norm_solve: cutoff must be non-negative");
  Eigen::MatrixXd b = system.rhs;
  const detail::TriangularFactor f = detail::streamed_qr(system.a, b);
  const detail::DenseSvd svd = detail::square_svd(f.r, true);

  MinNormSolution out;
  out.singular_values = svd.sigma;
  const double sigma_max = svd.sigma.size() ? svd.sigma(0) : 0.0;
  const double tol = cutoff * sigma_max;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(f.r.cols());
  for (Eigen::Index k = 0; k < svd.sigma.size(); ++k) {
    if (!(svd.sigma(k) > tol) || svd.sigma(k) == 0.0) continue;
    ++out.rank;
    x += svd.v.col(k) * (svd.u.col(k).dot(f.qtb.col(0)) / svd.sigma(k));
  }
  if (out.rank == 0) {
    throw Error("min_norm_solve: every singular value is below the cutoff");
  }
  out.displacement = from_unknowns(x);
  return out;
}

SvdReport svd_report(const BoundarySystem& system, bool with_vectors) {
  const detail::TriangularFactor f = detail::streamed_qr(system.a, Eigen::MatrixXd());
  const detail::DenseSvd svd = detail::square_svd(f.r, with_vectors);

  SvdReport rep;
  rep.singular_values = svd.sigma;
  const double sigma_max = svd.sigma.size() ? svd.sigma(0) : 0.0;
  const double tol = kNearZeroRelative * sigma_max;
  double smallest = sigma_max;
  for (Eigen::Index k = 0; k < svd.sigma.size(); ++k) {
    if (svd.sigma(k) < tol || svd.sigma(k) == 0.0) {
      ++rep.near_zero;
      if (with_vectors) rep.null_vectors.push_back(from_unknowns(svd.v.col(k)));
    } else {
      smallest = std::min(smallest, svd.sigma(k));
    }
  }
  rep.condition_number = smallest > 0.0 ? sigma_max / smallest : INFINITY;
  return rep;
}

std::vector<Vec2> rigid_motion_nodes(const BoundaryPolyline& boundary, double c1, double c2,
                                     double beta, int component) {
  std::vector<Vec2> out(boundary.node_count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (component >= 0 && boundary.component_of(k) != static_cast<std::size_t>(component)) {
      continue;
    }
    const Vec2 x = boundary.node(k);
    out[k] = {c1 - x.y * beta, c2 + x.x * beta};
  }
  return out;
}

Eigen::VectorXd to_unknowns(std::span<const Vec2> nodal) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(2 * nodal.size()));
  for (std::size_t k = 0; k < nodal.size(); ++k) {
    v(static_cast<Eigen::Index>(2 * k)) = nodal[k].x;
    v(static_cast<Eigen::Index>(2 * k + 1)) = nodal[k].y;
  }
  return v;
}

std::vector<Vec2> from_unknowns(const Eigen::VectorXd& unknowns) {
  std::vector<Vec2> out(static_cast<std::size_t>(unknowns.size() / 2));
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = {unknowns(static_cast<Eigen::Index>(2 * k)),
              unknowns(static_cast<Eigen::Index>(2 * k + 1))};
  }
  return out;
}

}  // namespace straintomo
