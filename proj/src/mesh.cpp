#include "straintomo/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>
#include <utility>

namespace straintomo {
namespace {

using Real = long double;

Real orient(Vec2 a, Vec2 b, Vec2 c) {
  return (Real(b.x) - a.x) * (Real(c.y) - a.y) - (Real(b.y) - a.y) * (Real(c.x) - a.x);
}

// Positive when p lies strictly inside the circumcircle of CCW (a, b, c).
Real incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
  const Real adx = Real(a.x) - p.x, ady = Real(a.y) - p.y;
  const Real bdx = Real(b.x) - p.x, bdy = Real(b.y) - p.y;
  const Real cdx = Real(c.x) - p.x, cdy = Real(c.y) - p.y;
  return (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) +
         (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy) +
         (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
}

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint32_t>(std::min(a, b));
  const auto hi = static_cast<std::uint32_t>(std::max(a, b));
  return (std::uint64_t{lo} << 32) | hi;
}

// Incremental Bowyer-Watson triangulation inside a large enclosing triangle.
class Delaunay {
 public:
  Delaunay(Vec2 lo, Vec2 hi) {
    const Vec2 c = 0.5 * (lo + hi);
    const double size = std::max({hi.x - lo.x, hi.y - lo.y, 1e-12});
    pts_ = {{c.x - 30 * size, c.y - 30 * size},
            {c.x + 30 * size, c.y - 30 * size},
            {c.x, c.y + 30 * size}};
    tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
  }

  static constexpr int kSuperVertices = 3;

  const std::vector<Vec2>& points() const { return pts_; }

  int insert(Vec2 p) {
    const int t0 = locate(p);
    for (int v : tris_[static_cast<std::size_t>(t0)].v) {
      if (pts_[static_cast<std::size_t>(v)] == p) return v;
    }
    const int pid = static_cast<int>(pts_.size());
    pts_.push_back(p);

    ++stamp_;
    mark_.resize(tris_.size(), 0);
    std::vector<int> cavity;
    std::vector<int> stack{t0};
    mark_[static_cast<std::size_t>(t0)] = stamp_;
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      cavity.push_back(t);
      for (int n : tris_[static_cast<std::size_t>(t)].nb) {
        if (n < 0 || mark_[static_cast<std::size_t>(n)] == stamp_) continue;
        const auto& v = tris_[static_cast<std::size_t>(n)].v;
        if (incircle(pt(v[0]), pt(v[1]), pt(v[2]), p) > 0) {
          mark_[static_cast<std::size_t>(n)] = stamp_;
          stack.push_back(n);
        }
      }
    }

    // Grow the cavity until p sees every boundary edge strictly from inside;
    // this absorbs rounding near cocircular configurations.
    struct Edge {
      int a, b, outer;
    };
    std::vector<Edge> rim;
    for (bool grown = true; grown;) {
      grown = false;
      rim.clear();
      for (int t : cavity) {
        const Tri& tri = tris_[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
          const int n = tri.nb[k];
          if (n >= 0 && mark_[static_cast<std::size_t>(n)] == stamp_) continue;
          rim.push_back({tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], n});
        }
      }
      for (const Edge& e : rim) {
        if (e.outer >= 0 && orient(pt(e.a), pt(e.b), p) <= 0) {
          mark_[static_cast<std::size_t>(e.outer)] = stamp_;
          cavity.push_back(e.outer);
          grown = true;
          break;
        }
      }
    }

    std::unordered_map<int, int> by_start;
    std::unordered_map<int, int> by_end;
    for (const Edge& e : rim) {
      const int nt = static_cast<int>(tris_.size());
      tris_.push_back({{e.a, e.b, pid}, {-1, -1, e.outer}, true});
      if (e.outer >= 0) {
        Tri& o = tris_[static_cast<std::size_t>(e.outer)];
        for (int k = 0; k < 3; ++k) {
          if (o.v[(k + 1) % 3] == e.b && o.v[(k + 2) % 3] == e.a) o.nb[k] = nt;
        }
      }
      by_start[e.a] = nt;
      by_end[e.b] = nt;
    }
    for (const Edge& e : rim) {
      Tri& t = tris_[static_cast<std::size_t>(by_start[e.a])];
      t.nb[0] = by_start.at(e.b);
      t.nb[1] = by_end.at(e.a);
    }
    for (int t : cavity) tris_[static_cast<std::size_t>(t)].alive = false;
    last_ = static_cast<int>(tris_.size()) - 1;
    return pid;
  }

  std::unordered_map<std::uint64_t, int> edge_counts() const {
    std::unordered_map<std::uint64_t, int> edges;
    for (const Tri& t : tris_) {
      if (!t.alive) continue;
      for (int k = 0; k < 3; ++k) ++edges[edge_key(t.v[k], t.v[(k + 1) % 3])];
    }
    return edges;
  }

  std::vector<std::array<int, 3>> triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const Tri& t : tris_) {
      if (t.alive) out.push_back(t.v);
    }
    return out;
  }

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb;  // neighbour opposite v[k]
    bool alive;
  };

  Vec2 pt(int v) const { return pts_[static_cast<std::size_t>(v)]; }

  int locate(Vec2 p) const {
    int t = last_;
    if (!tris_[static_cast<std::size_t>(t)].alive) {
      for (t = static_cast<int>(tris_.size()) - 1; !tris_[static_cast<std::size_t>(t)].alive; --t) {
      }
    }
    const std::size_t limit = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const Tri& tri = tris_[static_cast<std::size_t>(t)];
      int next = -1;
      for (int j = 0; j < 3; ++j) {
        const int k = static_cast<int>((j + step) % 3);
        if (orient(pt(tri.v[(k + 1) % 3]), pt(tri.v[(k + 2) % 3]), p) < 0) {
          next = tri.nb[k];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // Walk failed to settle; fall back to exhaustive search.
    for (std::size_t k = 0; k < tris_.size(); ++k) {
      const Tri& tri = tris_[k];
      if (!tri.alive) continue;
      if (orient(pt(tri.v[0]), pt(tri.v[1]), p) >= 0 &&
          orient(pt(tri.v[1]), pt(tri.v[2]), p) >= 0 &&
          orient(pt(tri.v[2]), pt(tri.v[0]), p) >= 0) {
        return static_cast<int>(k);
      }
    }
    throw Error("mesh_domain: point location failed");
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> mark_;
  int stamp_ = 0;
  int last_ = 0;
};

// Arc-length parametrisation of one closed loop.
class LoopArc {
 public:
  explicit LoopArc(const BoundaryPolyline::Loop& loop) : loop_(loop) {
    cumulative_.push_back(0.0);
    for (std::size_t k = 0; k < loop.size(); ++k) {
      cumulative_.push_back(cumulative_.back() + norm(loop[(k + 1) % loop.size()] - loop[k]));
    }
  }

  double length() const { return cumulative_.back(); }
  double at_node(std::size_t k) const { return cumulative_[k]; }

  PolylinePosition position(double s) const {
    s = std::fmod(s, length());
    if (s < 0) s += length();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    std::size_t seg = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    seg = std::min(seg, loop_.size() - 1);
    const double len = cumulative_[seg + 1] - cumulative_[seg];
    return {seg, len > 0 ? (s - cumulative_[seg]) / len : 0.0};
  }

  Vec2 point(const PolylinePosition& pos) const {
    const Vec2 a = loop_[pos.segment];
    const Vec2 b = loop_[(pos.segment + 1) % loop_.size()];
    if (pos.t == 0.0) return a;
    return (1.0 - pos.t) * a + pos.t * b;
  }

 private:
  const BoundaryPolyline::Loop& loop_;
  std::vector<double> cumulative_;
};

// Arc positions of resampled boundary points; polyline nodes whose turning
// angle exceeds 30 degrees are always kept.
std::vector<double> resample_arc(const BoundaryPolyline::Loop& loop, const LoopArc& arc,
                                 double h) {
  const std::size_t n = loop.size();
  std::vector<std::size_t> corners;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 in = loop[k] - loop[(k + n - 1) % n];
    const Vec2 out = loop[(k + 1) % n] - loop[k];
    const double turn = std::atan2(std::abs(cross(in, out)), dot(in, out));
    if (turn > std::numbers::pi / 6.0) corners.push_back(k);
  }
  std::vector<double> s;
  const double total = arc.length();
  if (corners.empty()) {
    const int m = std::max(3, static_cast<int>(std::lround(total / h)));
    for (int j = 0; j < m; ++j) s.push_back(total * j / m);
    return s;
  }
  for (std::size_t c = 0; c < corners.size(); ++c) {
    const double start = arc.at_node(corners[c]);
    double end = arc.at_node(corners[(c + 1) % corners.size()]);
    if (end <= start) end += total;
    const int m = std::max(1, static_cast<int>(std::lround((end - start) / h)));
    for (int j = 0; j < m; ++j) s.push_back(start + (end - start) * j / m);
  }
  return s;
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  const double t = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return norm(p - (a + t * ab));
}

}  // namespace

double TriMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Vec2 a = vertices[static_cast<std::size_t>(tri[0])];
  const Vec2 b = vertices[static_cast<std::size_t>(tri[1])];
  const Vec2 c = vertices[static_cast<std::size_t>(tri[2])];
  return 0.5 * cross(b - a, c - a);
}

double TriMesh::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) sum += triangle_area(t);
  return sum;
}

double TriMesh::median_edge_length() const {
  std::map<std::uint64_t, double> edges;
  for (const auto& tri : triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[static_cast<std::size_t>(k)];
      const int b = tri[static_cast<std::size_t>((k + 1) % 3)];
      edges[edge_key(a, b)] =
          norm(vertices[static_cast<std::size_t>(a)] - vertices[static_cast<std::size_t>(b)]);
    }
  }
  std::vector<double> lengths;
  lengths.reserve(edges.size());
  for (const auto& [key, len] : edges) lengths.push_back(len);
  if (lengths.empty()) return 0.0;
  auto mid = lengths.begin() + static_cast<std::ptrdiff_t>(lengths.size() / 2);
  std::nth_element(lengths.begin(), mid, lengths.end());
  return *mid;
}

BoundaryPolyline TriMesh::boundary_polyline() const {
  BoundaryPolyline::Loop loop;
  loop.reserve(boundary_loop.size());
  for (int v : boundary_loop) loop.push_back(vertices[static_cast<std::size_t>(v)]);
  return BoundaryPolyline({std::move(loop)});
}

void TriMesh::validate() const {
  std::unordered_map<std::uint64_t, int> edges;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int v : triangles[t]) {
      if (v < 0 || static_cast<std::size_t>(v) >= vertices.size()) {
        throw Error("mesh: triangle references a missing vertex");
      }
    }
    if (!(triangle_area(t) > 0.0)) throw Error("mesh: triangle with non-positive area");
    for (int k = 0; k < 3; ++k) {
      ++edges[edge_key(triangles[t][static_cast<std::size_t>(k)],
                       triangles[t][static_cast<std::size_t>((k + 1) % 3)])];
    }
  }
  std::size_t boundary_edges = 0;
  for (const auto& [key, count] : edges) {
    if (count > 2) throw Error("mesh: edge shared by more than two triangles");
    if (count == 1) ++boundary_edges;
  }
  if (boundary_edges != boundary_loop.size()) {
    throw Error("mesh: boundary edges do not form the recorded boundary loop");
  }
  for (std::size_t k = 0; k < boundary_loop.size(); ++k) {
    const auto it = edges.find(
        edge_key(boundary_loop[k], boundary_loop[(k + 1) % boundary_loop.size()]));
    if (it == edges.end() || it->second != 1) {
      throw Error("mesh: boundary loop edge is not a boundary edge of the mesh");
    }
  }
}

TriMesh mesh_domain(const BoundaryPolyline& boundary, double target_h) {
  if (!(target_h > 0.0)) throw Error("mesh_domain: target element size must be positive");
  boundary.validate();
  if (boundary.component_count() != 1) {
    throw Error("mesh_domain: only single-loop boundaries are supported");
  }
  const auto& loop = boundary.loops().front();
  const LoopArc arc(loop);
  if (target_h > arc.length() / 3.0) {
    throw Error("mesh_domain: target element size is too large for the boundary");
  }

  std::vector<double> arc_s = resample_arc(loop, arc, target_h);
  Vec2 lo{INFINITY, INFINITY};
  Vec2 hi{-INFINITY, -INFINITY};
  for (const Vec2& p : loop) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }

  Delaunay dt(lo, hi);
  std::vector<int> bnd_ids;
  std::vector<Vec2> bnd_pts;
  for (double s : arc_s) {
    const Vec2 p = arc.point(arc.position(s));
    bnd_pts.push_back(p);
    bnd_ids.push_back(dt.insert(p));
  }

  // Hexagonal lattice, kept away from the boundary by about half a spacing.
  const BoundaryPolyline resampled({bnd_pts});
  const double row_h = target_h * std::sqrt(3.0) / 2.0;
  const double clearance = 0.55 * target_h;
  const int rows = static_cast<int>(std::ceil((hi.y - lo.y) / row_h)) + 1;
  const int cols = static_cast<int>(std::ceil((hi.x - lo.x) / target_h)) + 2;
  const double y0 = 0.5 * (lo.y + hi.y) - 0.5 * (rows - 1) * row_h;
  const double x0 = 0.5 * (lo.x + hi.x) - 0.5 * (cols - 1) * target_h;
  for (int j = 0; j < rows; ++j) {
    const double y = y0 + j * row_h;
    const double shift = (j % 2) ? 0.5 * target_h : 0.0;
    for (int i = 0; i < cols; ++i) {
      const Vec2 p{x0 + shift + i * target_h, y};
      if (!resampled.contains(p)) continue;
      double d = INFINITY;
      for (std::size_t k = 0; k < bnd_pts.size() && d >= clearance; ++k) {
        d = std::min(d, distance_to_segment(p, bnd_pts[k], bnd_pts[(k + 1) % bnd_pts.size()]));
      }
      if (d >= clearance) dt.insert(p);
    }
  }

  // Split boundary edges that the Delaunay triangulation does not contain.
  for (int iter = 0;; ++iter) {
    const auto edges = dt.edge_counts();
    std::vector<std::size_t> missing;
    for (std::size_t k = 0; k < bnd_ids.size(); ++k) {
      if (!edges.contains(edge_key(bnd_ids[k], bnd_ids[(k + 1) % bnd_ids.size()]))) {
        missing.push_back(k);
      }
    }
    if (missing.empty()) break;
    if (iter > 40) throw Error("mesh_domain: boundary recovery did not converge");
    for (auto it = missing.rbegin(); it != missing.rend(); ++it) {
      const std::size_t k = *it;
      double s0 = arc_s[k];
      double s1 = k + 1 < arc_s.size() ? arc_s[k + 1] : arc_s[0] + arc.length();
      const double mid = 0.5 * (s0 + s1);
      const Vec2 p = arc.point(arc.position(mid));
      const int id = dt.insert(p);
      const auto pos = static_cast<std::ptrdiff_t>(k + 1);
      arc_s.insert(arc_s.begin() + pos, k + 1 < arc_s.size() ? mid : mid);
      bnd_ids.insert(bnd_ids.begin() + pos, id);
      bnd_pts.insert(bnd_pts.begin() + pos, p);
    }
  }

  // Keep triangles whose centroid is inside the boundary loop.
  const BoundaryPolyline final_loop({bnd_pts});
  const auto& pts = dt.points();
  std::vector<int> remap(pts.size(), -1);
  TriMesh mesh;
  for (const auto& tri : dt.triangles()) {
    bool super = false;
    for (int v : tri) super = super || v < Delaunay::kSuperVertices;
    if (super) continue;
    const Vec2 c = (1.0 / 3.0) * (pts[static_cast<std::size_t>(tri[0])] +
                                  pts[static_cast<std::size_t>(tri[1])] +
                                  pts[static_cast<std::size_t>(tri[2])]);
    if (!final_loop.contains(c)) continue;
    std::array<int, 3> out{};
    for (std::size_t k = 0; k < 3; ++k) {
      int& slot = remap[static_cast<std::size_t>(tri[k])];
      if (slot < 0) {
        slot = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(pts[static_cast<std::size_t>(tri[k])]);
      }
      out[k] = slot;
    }
    mesh.triangles.push_back(out);
  }

  mesh.on_boundary.assign(mesh.vertices.size(), 0);
  for (std::size_t k = 0; k < bnd_ids.size(); ++k) {
    const int v = remap[static_cast<std::size_t>(bnd_ids[k])];
    if (v < 0) throw Error("mesh_domain: boundary vertex not used by any triangle");
    mesh.boundary_loop.push_back(v);
    mesh.on_boundary[static_cast<std::size_t>(v)] = 1;
    mesh.boundary_position.push_back(arc.position(arc_s[k]));
  }
  mesh.validate();
  return mesh;
}

}  // namespace straintomo
