#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "straintomo/boundary_system.hpp"
#include "straintomo/config.hpp"
#include "straintomo/fem.hpp"
#include "straintomo/ray_transform.hpp"

namespace straintomo {

/// Error raised inside one pipeline stage; what() is "[stage] message".
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("[" + stage + "] " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Runs `body`, rethrowing any exception as a StageError tagged `stage`.
template <typename F>
auto run_stage(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

struct RunReport {
  std::vector<std::pair<std::string, double>> timings_s;
  double input_norm = 0.0;
  double residual_norm = 0.0;
  std::size_t boundary_nodes = 0;
  std::size_t system_rows = 0;
  std::size_t near_zero_singular = 0;
  std::size_t rank = 0;
  std::size_t mesh_vertices = 0;
  std::size_t mesh_elements = 0;
  std::size_t interior_pixels = 0;
  std::size_t sliver_pixels = 0;
  /// ||I(eps_recon) - input|| / ||input||; NaN for a zero input.
  double reprojection_misfit = 0.0;
  std::optional<double> relative_error;

  std::string to_json() const;
};

struct ReconstructionOptions {
  /// Strain to score eps_recon against.
  const SymTensorField2* truth = nullptr;
  /// Called on the recovered boundary displacement (mesh boundary order)
  /// before the finite-element solve.
  std::function<void(std::vector<Vec2>&, const BoundaryPolyline&)> perturb_boundary;
  RampWindow window = RampWindow::none;
  /// Write intermediates and report.json to config.outdir.
  bool write_outputs = true;
};

struct ReconstructionResult {
  SymTensorField2 s_eps;      ///< unmasked solenoidal estimate
  VectorField2 body_force;
  Sinogram residual;
  BoundaryPolyline recovery_boundary;  ///< mesh boundary vertices
  std::vector<Vec2> boundary_displacement;
  TriMesh mesh;
  SymTensorField2 du;
  SymTensorField2 eps_recon;
  RunReport report;
};

/// Eight-step reconstruction of a plane strain field from its LRT.
///
/// Boundary displacements are recovered at the boundary vertices of the
/// finite-element mesh, so the Dirichlet data needs no interpolation.
/// Multi-component boundaries are rejected.
ReconstructionResult reconstruct(const Sinogram& input, const BoundaryPolyline& boundary,
                                 const ReconstructionConfig& config,
                                 const ReconstructionOptions& options = {});

struct ConvergeCase {
  int n_angles = 0;
  double mesh_h = 0.0;
  double relative_error = 0.0;  ///< NaN when the run failed
  std::string failure;
};

/// Reconstructs `truth` from freshly noised scans for every (count, h) pair.
/// The noise stream depends on (seed, count) only, so all meshes at one
/// count see the same noisy sinogram. Writes converge.csv and converge.svg
/// to config.outdir when `write_outputs` is set.
std::vector<ConvergeCase> converge_study(const ReconstructionConfig& base,
                                         const BoundaryPolyline& boundary,
                                         const SymTensorField2& truth,
                                         const std::vector<int>& projection_counts,
                                         const std::vector<double>& mesh_sizes,
                                         double noise_level, std::uint64_t seed,
                                         bool write_outputs = true);

/// Scan geometry implied by a config for data on `grid`.
ScanGeometry scan_for(const ReconstructionConfig& config, const Grid2& grid, int n_angles);

}  // namespace straintomo
