#include "straintomo/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>

namespace straintomo {
namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << std::setprecision(17);
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

class Reader {
 public:
  explicit Reader(const fs::path& path) : path_(path), in_(path) {
    if (!in_) throw Error("cannot open '" + path.string() + "'");
  }

  void expect(const std::string& tag) {
    std::string word;
    if (!(in_ >> word) || word != tag) fail("expected '" + tag + "'");
  }

  template <typename T>
  T get(const char* what) {
    T value{};
    if (!(in_ >> value)) fail(std::string("could not read ") + what);
    return value;
  }

  double real(const char* what) {
    // operator>> rejects "nan"/"inf"; read tokens so the message is precise.
    std::string token;
    if (!(in_ >> token)) fail(std::string("could not read ") + what);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      fail(std::string("malformed number for ") + what + ": '" + token + "'");
    }
    if (used != token.size()) fail(std::string("malformed number for ") + what);
    if (!std::isfinite(v)) fail(std::string("non-finite value for ") + what);
    return v;
  }

  void end() {
    std::string extra;
    if (in_ >> extra) fail("unexpected trailing content '" + extra + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error("'" + path_.string() + "': " + msg);
  }

 private:
  fs::path path_;
  std::ifstream in_;
};

Grid2 read_grid(Reader& r) {
  const int nx = r.get<int>("nx");
  const int ny = r.get<int>("ny");
  const double xmin = r.real("xmin");
  const double xmax = r.real("xmax");
  const double ymin = r.real("ymin");
  const double ymax = r.real("ymax");
  try {
    return Grid2(nx, ny, xmin, xmax, ymin, ymax);
  } catch (const Error& e) {
    r.fail(e.what());
  }
}

void write_grid(std::ostream& out, const Grid2& g) {
  out << g.nx() << ' ' << g.ny() << ' ' << g.xmin() << ' ' << g.xmax() << ' ' << g.ymin() << ' '
      << g.ymax() << '\n';
}

}  // namespace

void write_tensor_field(const fs::path& path, const SymTensorField2& field) {
  field.validate();
  auto out = open_out(path);
  out << "STF2 ";
  write_grid(out, field.grid);
  for (std::size_t k = 0; k < field.grid.size(); ++k) {
    out << field.e11[k] << ' ' << field.e12[k] << ' ' << field.e22[k] << '\n';
  }
  finish(out, path);
}

SymTensorField2 read_tensor_field(const fs::path& path) {
  Reader r(path);
  r.expect("STF2");
  SymTensorField2 f(read_grid(r));
  for (std::size_t k = 0; k < f.grid.size(); ++k) {
    f.e11[k] = r.real("e11");
    f.e12[k] = r.real("e12");
    f.e22[k] = r.real("e22");
  }
  r.end();
  return f;
}

void write_vector_field(const fs::path& path, const VectorField2& field) {
  field.validate();
  auto out = open_out(path);
  out << "VF2 ";
  write_grid(out, field.grid);
  for (std::size_t k = 0; k < field.grid.size(); ++k) {
    out << field.u1[k] << ' ' << field.u2[k] << '\n';
  }
  finish(out, path);
}

VectorField2 read_vector_field(const fs::path& path) {
  Reader r(path);
  r.expect("VF2");
  VectorField2 f(read_grid(r));
  for (std::size_t k = 0; k < f.grid.size(); ++k) {
    f.u1[k] = r.real("u1");
    f.u2[k] = r.real("u2");
  }
  r.end();
  return f;
}

void write_sinogram(const fs::path& path, const Sinogram& sino) {
  const ScanGeometry& g = sino.geometry;
  auto out = open_out(path);
  out << "SINO " << g.n_angles << ' ' << g.n_rays << ' ' << g.angle_start << ' ' << g.angle_span
      << ' ' << g.s_min << ' ' << g.ray_spacing << '\n';
  for (int a = 0; a < g.n_angles; ++a) {
    for (int k = 0; k < g.n_rays; ++k) out << (k ? " " : "") << sino.at(a, k);
    out << '\n';
  }
  finish(out, path);
}

Sinogram read_sinogram(const fs::path& path) {
  Reader r(path);
  r.expect("SINO");
  ScanGeometry g;
  g.n_angles = r.get<int>("n_angles");
  g.n_rays = r.get<int>("n_rays");
  g.angle_start = r.real("angle_start");
  g.angle_span = r.real("angle_span");
  g.s_min = r.real("s_min");
  g.ray_spacing = r.real("ray_spacing");
  try {
    g.validate();
  } catch (const Error& e) {
    r.fail(e.what());
  }
  Sinogram s(g);
  for (double& v : s.values) v = r.real("sinogram value");
  r.end();
  return s;
}

void write_boundary(const fs::path& path, const BoundaryPolyline& boundary) {
  auto out = open_out(path);
  out << "BDY " << boundary.component_count() << '\n';
  for (const auto& loop : boundary.loops()) {
    out << "LOOP " << loop.size() << '\n';
    for (const Vec2& p : loop) out << p.x << ' ' << p.y << '\n';
  }
  finish(out, path);
}

BoundaryPolyline read_boundary(const fs::path& path) {
  Reader r(path);
  r.expect("BDY");
  const int n = r.get<int>("component count");
  if (n < 1) r.fail("component count must be positive");
  std::vector<BoundaryPolyline::Loop> loops;
  for (int c = 0; c < n; ++c) {
    r.expect("LOOP");
    const int m = r.get<int>("node count");
    if (m < 3) r.fail("a loop needs at least three nodes");
    BoundaryPolyline::Loop loop;
    for (int k = 0; k < m; ++k) {
      const double x = r.real("x");
      const double y = r.real("y");
      loop.push_back({x, y});
    }
    loops.push_back(std::move(loop));
  }
  r.end();
  BoundaryPolyline b(std::move(loops));
  try {
    b.validate();
  } catch (const Error& e) {
    r.fail(e.what());
  }
  return b;
}

void write_mesh(const fs::path& path, const TriMesh& mesh) {
  auto out = open_out(path);
  out << "MESH " << mesh.vertices.size() << ' ' << mesh.triangles.size() << '\n';
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    out << mesh.vertices[v].x << ' ' << mesh.vertices[v].y << ' '
        << int(v < mesh.on_boundary.size() ? mesh.on_boundary[v] : 0) << '\n';
  }
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  finish(out, path);
}

TriMesh read_mesh(const fs::path& path) {
  Reader r(path);
  r.expect("MESH");
  const long nv = r.get<long>("vertex count");
  const long nt = r.get<long>("triangle count");
  if (nv < 3 || nt < 1) r.fail("mesh needs at least three vertices and one triangle");
  TriMesh mesh;
  for (long v = 0; v < nv; ++v) {
    const double x = r.real("x");
    const double y = r.real("y");
    const int flag = r.get<int>("boundary flag");
    mesh.vertices.push_back({x, y});
    mesh.on_boundary.push_back(flag ? 1 : 0);
  }
  for (long t = 0; t < nt; ++t) {
    std::array<int, 3> tri{};
    for (int& v : tri) {
      v = r.get<int>("vertex index");
      if (v < 0 || v >= nv) r.fail("triangle vertex index out of range");
    }
    mesh.triangles.push_back(tri);
  }
  r.end();

  // Directed boundary edges are the ones whose reverse is absent.
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : mesh.triangles) {
    for (std::size_t k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
  }
  std::map<int, int> successor;
  for (const auto& [edge, count] : directed) {
    if (!directed.contains({edge.second, edge.first})) {
      if (successor.contains(edge.first)) r.fail("boundary is not a single simple loop");
      successor[edge.first] = edge.second;
    }
  }
  if (successor.empty()) r.fail("mesh has no boundary");
  int v = successor.begin()->first;
  do {
    mesh.boundary_loop.push_back(v);
    if (!successor.contains(v)) r.fail("boundary is not a closed loop");
    v = successor[v];
  } while (v != mesh.boundary_loop.front() && mesh.boundary_loop.size() <= successor.size());
  if (mesh.boundary_loop.size() != successor.size()) r.fail("boundary is not a single loop");
  for (std::size_t k = 0; k < mesh.boundary_loop.size(); ++k) mesh.boundary_position.push_back({k, 0.0});
  try {
    mesh.validate();
  } catch (const Error& e) {
    r.fail(e.what());
  }
  return mesh;
}

void write_singular_values_csv(const fs::path& path, const Eigen::VectorXd& sigma) {
  auto out = open_out(path);
  out << "index,sigma\n";
  for (Eigen::Index k = 0; k < sigma.size(); ++k) out << k << ',' << sigma(k) << '\n';
  finish(out, path);
}

void write_null_vectors_csv(const fs::path& path, const BoundaryPolyline& boundary,
                            const std::vector<std::vector<Vec2>>& vectors) {
  auto out = open_out(path);
  out << "vector,node,x,y,u1,u2\n";
  for (std::size_t v = 0; v < vectors.size(); ++v) {
    for (std::size_t k = 0; k < vectors[v].size(); ++k) {
      const Vec2 p = boundary.node(k);
      out << v << ',' << k << ',' << p.x << ',' << p.y << ',' << vectors[v][k].x << ','
          << vectors[v][k].y << '\n';
    }
  }
  finish(out, path);
}

void write_nodal_csv(const fs::path& path, const BoundaryPolyline& boundary,
                     const std::vector<Vec2>& values) {
  auto out = open_out(path);
  out << "node,x,y,u1,u2\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Vec2 p = boundary.node(k);
    out << k << ',' << p.x << ',' << p.y << ',' << values[k].x << ',' << values[k].y << '\n';
  }
  finish(out, path);
}

}  // namespace straintomo
