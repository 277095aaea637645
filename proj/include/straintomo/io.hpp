#pragma once

#include <filesystem>
#include <vector>

#include "straintomo/boundary_system.hpp"
#include "straintomo/fields.hpp"
#include "straintomo/mesh.hpp"
#include "straintomo/polyline.hpp"
#include "straintomo/ray_transform.hpp"

namespace straintomo {

// Plain-text formats, numbers written with 17 significant digits.
//   STF2 nx ny xmin xmax ymin ymax   then nx*ny rows "e11 e12 e22" (x fastest)
//   VF2  nx ny xmin xmax ymin ymax   then nx*ny rows "u1 u2"
//   SINO n_angles n_rays angle_start angle_span s_min ray_spacing
//        then one row of n_rays values per angle
//   BDY n_components, then per loop "LOOP n" and n rows "x y"
//   MESH n_vertices n_triangles, rows "x y flag", then rows "i j k"
// Readers throw Error naming the file on any malformed content.

void write_tensor_field(const std::filesystem::path& path, const SymTensorField2& field);
SymTensorField2 read_tensor_field(const std::filesystem::path& path);

void write_vector_field(const std::filesystem::path& path, const VectorField2& field);
VectorField2 read_vector_field(const std::filesystem::path& path);

void write_sinogram(const std::filesystem::path& path, const Sinogram& sino);
Sinogram read_sinogram(const std::filesystem::path& path);

void write_boundary(const std::filesystem::path& path, const BoundaryPolyline& boundary);
BoundaryPolyline read_boundary(const std::filesystem::path& path);

void write_mesh(const std::filesystem::path& path, const TriMesh& mesh);
/// Boundary loop order is rebuilt from the boundary edges; boundary
/// positions refer to that loop itself.
TriMesh read_mesh(const std::filesystem::path& path);

/// "index,sigma" rows.
void write_singular_values_csv(const std::filesystem::path& path, const Eigen::VectorXd& sigma);
/// "vector,node,x,y,u1,u2" rows, one block per null vector.
void write_null_vectors_csv(const std::filesystem::path& path, const BoundaryPolyline& boundary,
                            const std::vector<std::vector<Vec2>>& vectors);
/// "node,x,y,u1,u2" rows.
void write_nodal_csv(const std::filesystem::path& path, const BoundaryPolyline& boundary,
                     const std::vector<Vec2>& values);

}  // namespace straintomo
