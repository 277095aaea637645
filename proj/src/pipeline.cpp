#include "straintomo/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>

#include "json.hpp"
#include "straintomo/io.hpp"
#include "straintomo/svg_plot.hpp"

namespace straintomo {
namespace {

namespace fs = std::filesystem;

class StageClock {
 public:
  explicit StageClock(RunReport& report) : report_(report) {}

  template <typename F>
  auto operator()(const std::string& stage, F&& body) -> decltype(body()) {
    const auto start = std::chrono::steady_clock::now();
    struct Record {
      RunReport& r;
      const std::string& s;
      std::chrono::steady_clock::time_point t0;
      ~Record() {
        r.timings_s.emplace_back(
            s, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      }
    } record{report_, stage, start};
    return run_stage(stage, std::forward<F>(body));
  }

 private:
  RunReport& report_;
};

SymTensorField2 add_fields(const SymTensorField2& a, const SymTensorField2& b) {
  SymTensorField2 out(a.grid);
  for (std::size_t k = 0; k < a.grid.size(); ++k) {
    out.e11[k] = a.e11[k] + b.e11[k];
    out.e12[k] = a.e12[k] + b.e12[k];
    out.e22[k] = a.e22[k] + b.e22[k];
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

}  // namespace

std::string RunReport::to_json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json t = nlohmann::ordered_json::object();
  double total = 0.0;
  for (const auto& [stage, seconds] : timings_s) {
    t[stage] = seconds;
    total += seconds;
  }
  t["total"] = total;
  j["timings_s"] = t;
  j["input_norm"] = input_norm;
  j["residual_norm"] = residual_norm;
  j["boundary_nodes"] = boundary_nodes;
  j["system_rows"] = system_rows;
  j["near_zero_singular"] = near_zero_singular;
  j["rank"] = rank;
  j["mesh_vertices"] = mesh_vertices;
  j["mesh_elements"] = mesh_elements;
  j["interior_pixels"] = interior_pixels;
  j["sliver_pixels"] = sliver_pixels;
  if (std::isfinite(reprojection_misfit)) {
    j["reprojection_misfit"] = reprojection_misfit;
  } else {
    j["reprojection_misfit"] = nullptr;
  }
  if (relative_error) {
    j["relative_error"] = *relative_error;
  } else {
    j["relative_error"] = nullptr;
  }
  return j.dump(2) + "\n";
}

ScanGeometry scan_for(const ReconstructionConfig& config, const Grid2& grid, int n_angles) {
  return ScanGeometry::covering(grid.circumradius(), n_angles, config.ray_spacing,
                                config.scan_span_deg * std::numbers::pi / 180.0);
}

ReconstructionResult reconstruct(const Sinogram& input, const BoundaryPolyline& boundary,
                                 const ReconstructionConfig& config,
                                 const ReconstructionOptions& options) {
  RunReport report;
  StageClock stage(report);

  const Grid2 grid = run_stage("setup", [&] {
    config.validate();
    boundary.validate();
    if (boundary.component_count() != 1) {
      throw Error(
          "the boundary has " + std::to_string(boundary.component_count()) +
          " components; full reconstruction supports one closed loop (use svd-report to "
          "inspect multi-component systems)");
    }
    return Grid2::square(config.grid_n, config.grid_extent);
  });
  const Mask mask = run_stage("setup", [&] { return make_mask(grid, boundary); });
  const ScanGeometry& geom = input.geometry;
  report.input_norm = l2_norm(input);

  // 1. Solenoidal part by tensor filtered back-projection.
  SymTensorField2 s_eps =
      stage("invert", [&] { return invert_solenoidal_2d(input, grid, options.window); });

  // 2-3. Spectral derivatives of the unmasked field and the body force.
  VectorField2 body_force =
      stage("body_force", [&] { return body_force_rhs(s_eps, config.elastic); });

  // 4-5. Re-project the masked solenoidal part and form the residual.
  const SymTensorField2 masked_s_eps = mask_field(s_eps, mask);
  Sinogram reprojected = stage("reproject", [&] { return lrt_forward(masked_s_eps, geom); });
  Sinogram residual = stage("residual", [&] { return input - reprojected; });
  report.residual_norm = l2_norm(residual);

  // 7a. Mesh first: its boundary vertices carry the displacement unknowns.
  TriMesh mesh = stage("mesh", [&] { return mesh_domain(boundary, config.mesh_h); });
  report.mesh_vertices = mesh.vertices.size();
  report.mesh_elements = mesh.triangles.size();
  BoundaryPolyline recovery = mesh.boundary_polyline();

  // 6. Boundary displacement from the residual.
  MinNormSolution u_boundary = stage("boundary", [&] {
    const BoundarySystem system = assemble_system(geom, recovery, residual);
    report.system_rows = system.rows.size();
    return min_norm_solve(system, config.svd_cutoff);
  });
  report.boundary_nodes = recovery.node_count();
  report.rank = u_boundary.rank;
  report.near_zero_singular = static_cast<std::size_t>(u_boundary.singular_values.size()) -
                              u_boundary.rank;
  if (options.perturb_boundary) options.perturb_boundary(u_boundary.displacement, recovery);

  // 7b. Potential part from the equilibrium problem.
  FemSolution fem = stage("fem", [&] {
    // body_force holds -Div(C : s_eps) = Div(C : du); the solver takes the
    // load f of -Div(C : du) = f.
    VectorField2 load(body_force.grid);
    for (std::size_t k = 0; k < load.grid.size(); ++k) {
      load.u1[k] = -body_force.u1[k];
      load.u2[k] = -body_force.u2[k];
    }
    const DirichletBC bc = dirichlet_on_loop(mesh, u_boundary.displacement);
    return solve_potential(mesh, bc, load, config.elastic);
  });

  // 8. Combine.
  ResampledStrain du = stage("combine", [&] { return resample_strain(fem, mask); });
  report.interior_pixels = du.interior_pixels;
  report.sliver_pixels = du.sliver_pixels;
  SymTensorField2 eps_recon = add_fields(masked_s_eps, du.field);

  stage("report", [&] {
    const Sinogram check = lrt_forward(eps_recon, geom);
    report.reprojection_misfit = report.input_norm > 0.0
                                     ? l2_norm(check - input) / report.input_norm
                                     : std::numeric_limits<double>::quiet_NaN();
    if (options.truth) report.relative_error = relative_error(eps_recon, *options.truth, mask);
    return 0;
  });

  if (options.write_outputs) {
    stage("write", [&] {
      const fs::path& dir = config.outdir;
      fs::create_directories(dir);
      write_tensor_field(dir / "s_eps.stf2", s_eps);
      write_vector_field(dir / "body_force.vf2", body_force);
      write_sinogram(dir / "reprojected_s_eps.sino", reprojected);
      write_sinogram(dir / "residual.sino", residual);
      write_nodal_csv(dir / "boundary_displacement.csv", recovery, u_boundary.displacement);
      write_singular_values_csv(dir / "boundary_singular_values.csv",
                                u_boundary.singular_values);
      write_mesh(dir / "mesh.mesh", mesh);
      write_tensor_field(dir / "du.stf2", du.field);
      write_tensor_field(dir / "eps_recon.stf2", eps_recon);
      return 0;
    });
    write_text(config.outdir / "report.json", report.to_json());
  }

  return ReconstructionResult{std::move(s_eps),
                              std::move(body_force),
                              std::move(residual),
                              std::move(recovery),
                              std::move(u_boundary.displacement),
                              std::move(mesh),
                              std::move(du.field),
                              std::move(eps_recon),
                              std::move(report)};
}

std::vector<ConvergeCase> converge_study(const ReconstructionConfig& base,
                                         const BoundaryPolyline& boundary,
                                         const SymTensorField2& truth,
                                         const std::vector<int>& projection_counts,
                                         const std::vector<double>& mesh_sizes,
                                         double noise_level, std::uint64_t seed,
                                         bool write_outputs) {
  std::vector<ConvergeCase> cases;
  for (int count : projection_counts) {
    std::optional<Sinogram> noisy;
    std::string scan_failure;
    try {
      const Sinogram clean = lrt_forward(truth, scan_for(base, truth.grid, count));
      const std::uint64_t stream =
          seed ^ (static_cast<std::uint64_t>(count) * 0x9E3779B97F4A7C15ULL);
      noisy = add_noise(clean, noise_level, stream);
    } catch (const std::exception& e) {
      scan_failure = std::string("[forward] ") + e.what();
    }
    for (double h : mesh_sizes) {
      ConvergeCase c;
      c.n_angles = count;
      c.mesh_h = h;
      c.relative_error = std::numeric_limits<double>::quiet_NaN();
      if (!noisy) {
        c.failure = scan_failure;
      } else {
        try {
          ReconstructionConfig cfg = base;
          cfg.scan_angles = count;
          cfg.mesh_h = h;
          ReconstructionOptions opt;
          opt.truth = &truth;
          opt.write_outputs = false;
          c.relative_error = *reconstruct(*noisy, boundary, cfg, opt).report.relative_error;
        } catch (const std::exception& e) {
          c.failure = e.what();
        }
      }
      if (!c.failure.empty()) {
        std::clog << "warning: converge: run (" << count << ", " << h << ") failed: " << c.failure
                  << '\n';
      }
      cases.push_back(c);
    }
  }

  if (write_outputs) {
    fs::create_directories(base.outdir);
    std::ofstream csv(base.outdir / "converge.csv");
    csv << std::setprecision(17) << "n_angles,target_h,e\n";
    for (const auto& c : cases) {
      csv << c.n_angles << ',' << c.mesh_h << ',';
      if (std::isfinite(c.relative_error)) csv << c.relative_error;
      csv << '\n';
    }
    if (!csv) throw Error("cannot write converge.csv");

    std::vector<PlotSeries> series;
    for (double h : mesh_sizes) {
      PlotSeries s;
      s.label = "h = " + std::to_string(h).substr(0, 6);
      for (const auto& c : cases) {
        if (c.mesh_h != h) continue;
        s.x.push_back(c.n_angles);
        s.y.push_back(c.relative_error);
      }
      series.push_back(std::move(s));
    }
    PlotSpec spec;
    spec.title = "Relative error vs projections (noise " + std::to_string(noise_level) + ")";
    spec.x_label = "projections";
    spec.y_label = "relative error";
    spec.log_y = true;
    write_text(base.outdir / "converge.svg", line_plot_svg(spec, series));
  }
  return cases;
}

}  // namespace straintomo
