#include "straintomo/fem.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

namespace straintomo {
namespace {

struct ElementGeometry {
  double area;
  std::array<double, 3> b;  // d N_i / dx * 2A
  std::array<double, 3> c;  // d N_i / dy * 2A
};

ElementGeometry element_geometry(const TriMesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles[t];
  std::array<Vec2, 3> p;
  for (std::size_t i = 0; i < 3; ++i) p[i] = mesh.vertices[static_cast<std::size_t>(tri[i])];
  ElementGeometry g{};
  g.area = 0.5 * cross(p[1] - p[0], p[2] - p[0]);
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec2 pj = p[(i + 1) % 3];
    const Vec2 pk = p[(i + 2) % 3];
    g.b[i] = pj.y - pk.y;
    g.c[i] = pk.x - pj.x;
  }
  return g;
}

using ElementMatrix = Eigen::Matrix<double, 6, 6>;

ElementMatrix element_stiffness(const ElementGeometry& g, const PlaneStiffness& s) {
  // Engineering shear strain in the third row.
  Eigen::Matrix<double, 3, 6> bm = Eigen::Matrix<double, 3, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    const auto k = static_cast<std::size_t>(i);
    bm(0, 2 * i) = g.b[k];
    bm(1, 2 * i + 1) = g.c[k];
    bm(2, 2 * i) = g.c[k];
    bm(2, 2 * i + 1) = g.b[k];
  }
  bm /= 2.0 * g.area;
  Eigen::Matrix3d d;
  d << s.a, s.c, 0.0, s.c, s.a, 0.0, 0.0, 0.0, 0.5 * s.g;
  return g.area * bm.transpose() * d * bm;
}

ElementStrain element_strain(const ElementGeometry& g, const std::array<Vec2, 3>& u) {
  double e11 = 0.0, e22 = 0.0, gamma = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    e11 += g.b[i] * u[i].x;
    e22 += g.c[i] * u[i].y;
    gamma += g.c[i] * u[i].x + g.b[i] * u[i].y;
  }
  const double inv = 1.0 / (2.0 * g.area);
  return {e11 * inv, 0.5 * gamma * inv, e22 * inv};
}

Vec2 centroid(const TriMesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles[t];
  return (1.0 / 3.0) * (mesh.vertices[static_cast<std::size_t>(tri[0])] +
                        mesh.vertices[static_cast<std::size_t>(tri[1])] +
                        mesh.vertices[static_cast<std::size_t>(tri[2])]);
}

FemSolution solve(const TriMesh& mesh, const DirichletBC& bc,
                  const std::function<Vec2(Vec2)>& body_force, const ElasticConstants& k) {
  k.validate();
  mesh.validate();
  const std::size_t nv = mesh.vertices.size();
  if (bc.vertex.size() != bc.value.size()) {
    throw Error("solve_potential: boundary condition vertex/value counts differ");
  }
  if (bc.vertex.empty()) {
    throw Error("solve_potential: no Dirichlet constraints; stiffness is singular");
  }

  std::vector<std::uint8_t> fixed(nv, 0);
  std::vector<Vec2> u(nv);
  for (std::size_t i = 0; i < bc.vertex.size(); ++i) {
    const int v = bc.vertex[i];
    if (v < 0 || static_cast<std::size_t>(v) >= nv) {
      throw Error("solve_potential: boundary condition references a missing vertex");
    }
    if (!std::isfinite(bc.value[i].x) || !std::isfinite(bc.value[i].y)) {
      throw Error("solve_potential: non-finite boundary displacement");
    }
    fixed[static_cast<std::size_t>(v)] = 1;
    u[static_cast<std::size_t>(v)] = bc.value[i];
  }
  for (int v : mesh.boundary_loop) {
    if (!fixed[static_cast<std::size_t>(v)]) {
      throw Error("solve_potential: boundary vertex without a prescribed displacement");
    }
  }

  // Free dof numbering.
  std::vector<int> dof(2 * nv, -1);
  int n_free = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    if (fixed[v]) continue;
    dof[2 * v] = n_free++;
    dof[2 * v + 1] = n_free++;
  }

  const PlaneStiffness s = plane_stiffness(k);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.triangles.size() * 36);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const ElementMatrix ke = element_stiffness(g, s);
    const Vec2 f = body_force(centroid(mesh, t));
    if (!std::isfinite(f.x) || !std::isfinite(f.y)) {
      throw Error("solve_potential: non-finite body force");
    }
    const auto& tri = mesh.triangles[t];
    std::array<std::size_t, 6> gdof{};
    std::array<double, 6> gval{};
    for (std::size_t i = 0; i < 3; ++i) {
      const auto v = static_cast<std::size_t>(tri[i]);
      gdof[2 * i] = 2 * v;
      gdof[2 * i + 1] = 2 * v + 1;
      gval[2 * i] = u[v].x;
      gval[2 * i + 1] = u[v].y;
    }
    for (int r = 0; r < 6; ++r) {
      const int row = dof[gdof[static_cast<std::size_t>(r)]];
      if (row < 0) continue;
      rhs(row) += (r % 2 == 0 ? f.x : f.y) * g.area / 3.0;
      for (int c = 0; c < 6; ++c) {
        const int col = dof[gdof[static_cast<std::size_t>(c)]];
        if (col >= 0) {
          triplets.emplace_back(row, col, ke(r, c));
        } else {
          rhs(row) -= ke(r, c) * gval[static_cast<std::size_t>(c)];
        }
      }
    }
  }

  if (n_free > 0) {
    Eigen::SparseMatrix<double> kff(n_free, n_free);
    kff.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(kff);
    if (ldlt.info() != Eigen::Success) {
      throw Error("solve_potential: stiffness factorisation failed (singular system)");
    }
    Eigen::VectorXd x = ldlt.solve(rhs);
    const double rhs_norm = rhs.norm();
    const double res = (kff * x - rhs).norm();
    if (!std::isfinite(res) || res > 1e-10 * std::max(rhs_norm, 1e-300)) {
      if (rhs_norm > 0.0 || res > 0.0) {
        throw Error("solve_potential: linear solve residual above tolerance");
      }
    }
    for (std::size_t v = 0; v < nv; ++v) {
      if (fixed[v]) continue;
      u[v] = {x(dof[2 * v]), x(dof[2 * v + 1])};
    }
  }

  FemSolution sol;
  sol.mesh = mesh;
  sol.displacement = std::move(u);
  sol.element_strain.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const std::array<Vec2, 3> ue{sol.displacement[static_cast<std::size_t>(tri[0])],
                                 sol.displacement[static_cast<std::size_t>(tri[1])],
                                 sol.displacement[static_cast<std::size_t>(tri[2])]};
    sol.element_strain[t] = element_strain(element_geometry(mesh, t), ue);
  }
  return sol;
}

// Uniform buckets of triangle indices for point location.
class TriangleLocator {
 public:
  explicit TriangleLocator(const TriMesh& mesh) : mesh_(mesh) {
    lo_ = {INFINITY, INFINITY};
    Vec2 hi{-INFINITY, -INFINITY};
    for (const Vec2& p : mesh.vertices) {
      lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    cell_ = std::max(mesh.median_edge_length(), 1e-12);
    nx_ = static_cast<int>((hi.x - lo_.x) / cell_) + 1;
    ny_ = static_cast<int>((hi.y - lo_.y) / cell_) + 1;
    buckets_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      Vec2 tlo{INFINITY, INFINITY};
      Vec2 thi{-INFINITY, -INFINITY};
      for (int v : mesh.triangles[t]) {
        const Vec2 p = mesh.vertices[static_cast<std::size_t>(v)];
        tlo = {std::min(tlo.x, p.x), std::min(tlo.y, p.y)};
        thi = {std::max(thi.x, p.x), std::max(thi.y, p.y)};
      }
      for (int j = cell_y(tlo.y); j <= cell_y(thi.y); ++j) {
        for (int i = cell_x(tlo.x); i <= cell_x(thi.x); ++i) {
          buckets_[bucket(i, j)].push_back(static_cast<int>(t));
        }
      }
    }
  }

  /// Containing triangle or -1.
  int find(Vec2 p) const {
    const int i = cell_x(p.x);
    const int j = cell_y(p.y);
    if (p.x < lo_.x - cell_ || p.y < lo_.y - cell_) return -1;
    for (int t : buckets_[bucket(i, j)]) {
      if (contains(static_cast<std::size_t>(t), p)) return t;
    }
    return -1;
  }

  int nearest(Vec2 p) const {
    int best = -1;
    double best_d = INFINITY;
    for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) {
      const double d = distance(t, p);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(t);
      }
    }
    return best;
  }

 private:
  int cell_x(double x) const {
    return std::clamp(static_cast<int>(std::floor((x - lo_.x) / cell_)), 0, nx_ - 1);
  }
  int cell_y(double y) const {
    return std::clamp(static_cast<int>(std::floor((y - lo_.y) / cell_)), 0, ny_ - 1);
  }
  std::size_t bucket(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(i);
  }

  Vec2 vertex(std::size_t t, std::size_t k) const {
    return mesh_.vertices[static_cast<std::size_t>(mesh_.triangles[t][k])];
  }

  bool contains(std::size_t t, Vec2 p) const {
    const double tol = -1e-12 * cell_ * cell_;
    for (std::size_t k = 0; k < 3; ++k) {
      if (cross(vertex(t, (k + 1) % 3) - vertex(t, k), p - vertex(t, k)) < tol) return false;
    }
    return true;
  }

  double distance(std::size_t t, Vec2 p) const {
    if (contains(t, p)) return 0.0;
    double d = INFINITY;
    for (std::size_t k = 0; k < 3; ++k) {
      const Vec2 a = vertex(t, k);
      const Vec2 ab = vertex(t, (k + 1) % 3) - a;
      const double s = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
      d = std::min(d, norm(p - (a + s * ab)));
    }
    return d;
  }

  const TriMesh& mesh_;
  Vec2 lo_;
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace

DirichletBC dirichlet_on_loop(const TriMesh& mesh, std::span<const Vec2> loop_values) {
  if (loop_values.size() != mesh.boundary_loop.size()) {
    throw Error("dirichlet_on_loop: value count differs from the boundary vertex count");
  }
  DirichletBC bc;
  bc.vertex = mesh.boundary_loop;
  bc.value.assign(loop_values.begin(), loop_values.end());
  return bc;
}

DirichletBC dirichlet_from_polyline(const TriMesh& mesh, const BoundaryPolyline& source,
                                    std::span<const Vec2> node_values) {
  if (source.component_count() != 1 || node_values.size() != source.node_count()) {
    throw Error("dirichlet_from_polyline: expected one value per node of a single loop");
  }
  const std::size_t n = source.node_count();
  DirichletBC bc;
  bc.vertex = mesh.boundary_loop;
  for (const PolylinePosition& pos : mesh.boundary_position) {
    if (pos.segment >= n) throw Error("dirichlet_from_polyline: position outside the polyline");
    const Vec2 a = node_values[pos.segment];
    const Vec2 b = node_values[(pos.segment + 1) % n];
    bc.value.push_back((1.0 - pos.t) * a + pos.t * b);
  }
  return bc;
}

DirichletBC dirichlet_from_function(const TriMesh& mesh,
                                    const std::function<Vec2(Vec2)>& displacement) {
  DirichletBC bc;
  bc.vertex = mesh.boundary_loop;
  for (int v : mesh.boundary_loop) {
    bc.value.push_back(displacement(mesh.vertices[static_cast<std::size_t>(v)]));
  }
  return bc;
}

Eigen::SparseMatrix<double> assemble_stiffness(const TriMesh& mesh, const ElasticConstants& k) {
  k.validate();
  const PlaneStiffness s = plane_stiffness(k);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.triangles.size() * 36);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const ElementMatrix ke = element_stiffness(element_geometry(mesh, t), s);
    const auto& tri = mesh.triangles[t];
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) {
        triplets.emplace_back(2 * tri[static_cast<std::size_t>(r / 2)] + r % 2,
                              2 * tri[static_cast<std::size_t>(c / 2)] + c % 2, ke(r, c));
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(2 * mesh.vertices.size());
  Eigen::SparseMatrix<double> kg(n, n);
  kg.setFromTriplets(triplets.begin(), triplets.end());
  return kg;
}

FemSolution solve_potential(const TriMesh& mesh, const DirichletBC& bc, const VectorField2& b,
                            const ElasticConstants& k) {
  b.validate();
  return solve(mesh, bc,
               [&b](Vec2 p) {
                 return Vec2{sample_bilinear(b.grid, b.u1, p), sample_bilinear(b.grid, b.u2, p)};
               },
               k);
}

FemSolution solve_potential(const TriMesh& mesh, const DirichletBC& bc,
                            const std::function<Vec2(Vec2)>& b, const ElasticConstants& k) {
  return solve(mesh, bc, b, k);
}

ResampledStrain resample_strain(const FemSolution& solution, const Mask& mask) {
  const Grid2& grid = mask.grid;
  ResampledStrain out{SymTensorField2(grid)};
  if (solution.mesh.triangles.empty()) throw Error("resample_strain: empty mesh");
  const TriangleLocator locator(solution.mesh);
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const std::size_t idx = grid.index(i, j);
      if (!mask.inside[idx]) continue;
      ++out.interior_pixels;
      const Vec2 p{grid.x(i), grid.y(j)};
      int t = locator.find(p);
      if (t < 0) {
        ++out.sliver_pixels;
        t = locator.nearest(p);
      }
      const ElementStrain& e = solution.element_strain[static_cast<std::size_t>(t)];
      out.field.e11[idx] = e[0];
      out.field.e12[idx] = e[1];
      out.field.e22[idx] = e[2];
    }
  }
  return out;
}

}  // namespace straintomo
