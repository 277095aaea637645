#pragma once

#include <Eigen/SparseCore>
#include <array>
#include <functional>
#include <span>
#include <vector>

#include "straintomo/elastic.hpp"
#include "straintomo/mesh.hpp"

namespace straintomo {

/// Prescribed displacement per constrained mesh vertex.
struct DirichletBC {
  std::vector<int> vertex;
  std::vector<Vec2> value;
};

/// `loop_values[k]` prescribes mesh.boundary_loop[k].
DirichletBC dirichlet_on_loop(const TriMesh& mesh, std::span<const Vec2> loop_values);

/// Interpolates nodal values of the single-loop polyline the mesh was built
/// from, using each boundary vertex's recorded polyline position.
DirichletBC dirichlet_from_polyline(const TriMesh& mesh, const BoundaryPolyline& source,
                                    std::span<const Vec2> node_values);

DirichletBC dirichlet_from_function(const TriMesh& mesh,
                                    const std::function<Vec2(Vec2)>& displacement);

/// Global stiffness (dofs 2v, 2v+1) before constraints.
Eigen::SparseMatrix<double> assemble_stiffness(const TriMesh& mesh, const ElasticConstants& k);

/// Strain (e11, e12, e22) of one constant-strain element.
using ElementStrain = std::array<double, 3>;

struct FemSolution {
  TriMesh mesh;
  std::vector<Vec2> displacement;             ///< per vertex
  std::vector<ElementStrain> element_strain;  ///< per triangle
};

/// Solves Div(C : du) = -b with u = bc on the constrained vertices; the load
/// uses b at each element centroid.
FemSolution solve_potential(const TriMesh& mesh, const DirichletBC& bc, const VectorField2& b,
                            const ElasticConstants& k);

/// Same with an analytic body force.
FemSolution solve_potential(const TriMesh& mesh, const DirichletBC& bc,
                            const std::function<Vec2(Vec2)>& b, const ElasticConstants& k);

struct ResampledStrain {
  SymTensorField2 field;
  std::size_t interior_pixels = 0;
  /// Interior pixels outside every element, filled from the nearest one.
  std::size_t sliver_pixels = 0;
};

/// Piecewise-constant element strain at the masked pixel centres, zero elsewhere.
ResampledStrain resample_strain(const FemSolution& solution, const Mask& mask);

}  // namespace straintomo
