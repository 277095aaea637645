#include "straintomo/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>

#include "CLI11.hpp"
#include "straintomo/airy.hpp"
#include "straintomo/io.hpp"
#include "straintomo/pipeline.hpp"
#include "straintomo/svg_plot.hpp"

namespace straintomo {
namespace {

namespace fs = std::filesystem;

// Values given on the command line; unset ones fall back to the config file.
struct Overrides {
  std::string config_file;
  std::optional<std::string> outdir;
  std::optional<int> grid_n;
  std::optional<double> extent;
  std::optional<int> angles;
  std::optional<double> spacing;
  std::optional<double> span_deg;
  std::optional<double> mesh_h;
  std::optional<double> cutoff;
  std::optional<double> noise;
  std::optional<std::uint64_t> seed;
};

ReconstructionConfig resolve(const Overrides& o) {
  ReconstructionConfig c;
  if (!o.config_file.empty()) c = make_config(KeyValueConfig::load(o.config_file));
  if (o.outdir) c.outdir = *o.outdir;
  if (o.grid_n) c.grid_n = *o.grid_n;
  if (o.extent) c.grid_extent = *o.extent;
  if (o.angles) c.scan_angles = *o.angles;
  if (o.spacing) c.ray_spacing = *o.spacing;
  if (o.span_deg) c.scan_span_deg = *o.span_deg;
  if (o.mesh_h) c.mesh_h = *o.mesh_h;
  if (o.cutoff) c.svd_cutoff = *o.cutoff;
  if (o.noise) c.noise_level = *o.noise;
  if (o.seed) c.noise_seed = *o.seed;
  c.validate();
  return c;
}

fs::path or_default(const fs::path& given, const fs::path& dir, const char* name) {
  return given.empty() ? dir / name : given;
}

BoundaryPolyline named_shape(const std::string& shape, int nodes) {
  if (shape == "disk") return make_disk(nodes);
  if (shape == "disk_with_hole") return make_disk_with_hole(nodes);
  if (shape == "three_disks") return make_three_disks(nodes);
  throw Error("unknown shape '" + shape + "'");
}

double boundary_radius(const BoundaryPolyline& b) {
  double r = 0.0;
  for (const auto& loop : b.loops()) {
    for (const Vec2& p : loop) r = std::max(r, norm(p));
  }
  return r;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_file, "key = value configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o.outdir, "output directory (io.outdir)");
}

void add_scan(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--angles", o.angles, "number of projections (scan.angles)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--spacing", o.spacing, "ray spacing (scan.ray_spacing)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--span-deg", o.span_deg, "angular span in degrees (scan.span_deg)");
}

void add_grid(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--n", o.grid_n, "pixels per axis (grid.n)")->check(CLI::PositiveNumber);
  cmd->add_option("--extent", o.extent, "grid half-width (grid.extent)")
      ->check(CLI::PositiveNumber);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw Error("malformed list entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error("empty list");
  return out;
}

RampWindow parse_window(const std::string& w) {
  return w == "cosine" ? RampWindow::cosine : RampWindow::none;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Strain tomography: reconstruct 2D elastic strain from longitudinal ray data"};
  app.require_subcommand(1);
  Overrides o;

  // phantom
  auto* phantom = app.add_subcommand("phantom", "write the Airy phantom and its boundary");
  std::string shape = "disk";
  int nodes = 1000;
  add_common(phantom, o);
  add_grid(phantom, o);
  phantom->add_option("--shape", shape, "disk | disk_with_hole | three_disks")
      ->check(CLI::IsMember({"disk", "disk_with_hole", "three_disks"}));
  phantom->add_option("--nodes", nodes, "boundary nodes per component")
      ->check(CLI::Range(3, 1000000));

  // forward
  auto* forward = app.add_subcommand("forward", "project a tensor field to a sinogram");
  std::string field_file, sino_out;
  add_common(forward, o);
  add_scan(forward, o);
  forward->add_option("--field", field_file, "STF2 input (default <out>/strain.stf2)");
  forward->add_option("--sino", sino_out, "SINO output (default <out>/sinogram.sino)");
  forward->add_option("--noise", o.noise, "noise level as a fraction of mean |value|");
  forward->add_option("--seed", o.seed, "noise seed");

  // invert
  auto* invert = app.add_subcommand("invert", "filtered back-projection of the solenoidal part");
  std::string sino_in, window = "none";
  add_common(invert, o);
  add_grid(invert, o);
  invert->add_option("--sino", sino_in, "SINO input (default <out>/sinogram.sino)");
  invert->add_option("--window", window, "ramp apodisation")
      ->check(CLI::IsMember({"none", "cosine"}));

  // recover-boundary
  auto* recover =
      app.add_subcommand("recover-boundary", "boundary displacement from a residual sinogram");
  std::string residual_file, boundary_file;
  add_common(recover, o);
  recover->add_option("--residual", residual_file, "SINO residual (default <out>/residual.sino)");
  recover->add_option("--boundary", boundary_file, "BDY file (default <out>/boundary.bdy)");
  recover->add_option("--cutoff", o.cutoff, "relative singular value cutoff (svd.cutoff)");

  // reconstruct
  auto* recon = app.add_subcommand("reconstruct", "full strain reconstruction");
  std::string truth_file;
  add_common(recon, o);
  add_grid(recon, o);
  recon->add_option("--sino", sino_in, "SINO input (default <out>/sinogram.sino)");
  recon->add_option("--boundary", boundary_file, "BDY file (default <out>/boundary.bdy)");
  recon->add_option("--truth", truth_file,
                    "STF2 reference strain (default <out>/strain.stf2 when present)");
  recon->add_option("--mesh-h", o.mesh_h, "target element size (mesh.h)");
  recon->add_option("--cutoff", o.cutoff, "relative singular value cutoff (svd.cutoff)");
  recon->add_option("--window", window, "ramp apodisation")
      ->check(CLI::IsMember({"none", "cosine"}));

  // svd-report
  auto* svd = app.add_subcommand("svd-report", "singular values of the boundary system");
  bool no_vectors = false;
  std::string svd_shape;
  add_common(svd, o);
  add_scan(svd, o);
  svd->add_option("--boundary", boundary_file, "BDY file");
  svd->add_option("--shape", svd_shape, "built-in boundary instead of a file")
      ->check(CLI::IsMember({"disk", "disk_with_hole", "three_disks"}));
  svd->add_option("--nodes", nodes, "nodes per component for --shape");
  svd->add_flag("--no-vectors", no_vectors, "skip the null-space vectors (faster)");

  // converge
  auto* conv = app.add_subcommand("converge", "error vs projections and mesh size");
  std::string counts_text = "50,100,250", meshes_text = "0.06,0.045,0.03";
  add_common(conv, o);
  add_grid(conv, o);
  conv->add_option("--spacing", o.spacing, "ray spacing (scan.ray_spacing)");
  conv->add_option("--span-deg", o.span_deg, "angular span in degrees (scan.span_deg)");
  conv->add_option("--boundary", boundary_file, "BDY file (default: 1000-node unit disk)");
  conv->add_option("--counts", counts_text, "comma-separated projection counts");
  conv->add_option("--meshes", meshes_text, "comma-separated target element sizes");
  conv->add_option("--noise", o.noise, "noise level (noise.level)");
  conv->add_option("--seed", o.seed, "noise seed (noise.seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  std::string stage = "config";
  try {
    const ReconstructionConfig cfg = resolve(o);
    const fs::path& dir = cfg.outdir;

    if (*phantom) {
      stage = "phantom";
      const Grid2 grid = Grid2::square(cfg.grid_n, cfg.grid_extent);
      const BoundaryPolyline boundary = named_shape(shape, nodes);
      const AiryPhantom ph = airy_phantom(grid, boundary, cfg.elastic);
      write_boundary(dir / "boundary.bdy", boundary);
      write_tensor_field(dir / "stress.stf2", ph.stress);
      write_tensor_field(dir / "strain.stf2", ph.strain);
      std::cout << "wrote " << (dir / "boundary.bdy").string() << ", stress.stf2, strain.stf2\n";
    } else if (*forward) {
      stage = "forward";
      const SymTensorField2 field = read_tensor_field(or_default(field_file, dir, "strain.stf2"));
      Sinogram sino = lrt_forward(field, scan_for(cfg, field.grid, cfg.scan_angles));
      if (cfg.noise_level > 0.0) sino = add_noise(sino, cfg.noise_level, cfg.noise_seed);
      const fs::path out = or_default(sino_out, dir, "sinogram.sino");
      write_sinogram(out, sino);
      std::cout << "wrote " << out.string() << " (" << sino.geometry.n_angles << " x "
                << sino.geometry.n_rays << ")\n";
    } else if (*invert) {
      stage = "invert";
      const Sinogram sino = read_sinogram(or_default(sino_in, dir, "sinogram.sino"));
      const SymTensorField2 s_eps = invert_solenoidal_2d(
          sino, Grid2::square(cfg.grid_n, cfg.grid_extent), parse_window(window));
      write_tensor_field(dir / "s_eps.stf2", s_eps);
      std::cout << "wrote " << (dir / "s_eps.stf2").string() << '\n';
    } else if (*recover) {
      stage = "recover-boundary";
      const Sinogram residual = read_sinogram(or_default(residual_file, dir, "residual.sino"));
      const BoundaryPolyline boundary = read_boundary(or_default(boundary_file, dir, "boundary.bdy"));
      const BoundarySystem system = assemble_system(residual.geometry, boundary, residual);
      const MinNormSolution sol = min_norm_solve(system, cfg.svd_cutoff);
      write_nodal_csv(dir / "boundary_displacement.csv", boundary, sol.displacement);
      write_singular_values_csv(dir / "singular_values.csv", sol.singular_values);
      std::cout << "rows: " << system.rows.size() << "\nunknowns: " << 2 * boundary.node_count()
                << "\nrank: " << sol.rank
                << "\nnear-zero: " << sol.singular_values.size() - static_cast<long>(sol.rank)
                << "\nwrote " << (dir / "boundary_displacement.csv").string() << '\n';
    } else if (*recon) {
      stage = "reconstruct";
      const Sinogram sino = read_sinogram(or_default(sino_in, dir, "sinogram.sino"));
      const BoundaryPolyline boundary = read_boundary(or_default(boundary_file, dir, "boundary.bdy"));
      std::optional<SymTensorField2> truth;
      const fs::path truth_path = or_default(truth_file, dir, "strain.stf2");
      if (!truth_file.empty() || fs::exists(truth_path)) truth = read_tensor_field(truth_path);
      ReconstructionOptions opt;
      opt.truth = truth ? &*truth : nullptr;
      opt.window = parse_window(window);
      const ReconstructionResult res = reconstruct(sino, boundary, cfg, opt);
      const RunReport& r = res.report;
      std::cout << std::setprecision(6) << "mesh elements: " << r.mesh_elements
                << "\nboundary nodes: " << r.boundary_nodes
                << "\nnear-zero: " << r.near_zero_singular
                << "\nsliver pixels: " << r.sliver_pixels << " of " << r.interior_pixels
                << "\nreprojection misfit: " << r.reprojection_misfit << '\n';
      if (r.relative_error) std::cout << "relative error: " << *r.relative_error << '\n';
      std::cout << "wrote " << (dir / "report.json").string() << '\n';
    } else if (*svd) {
      stage = "svd-report";
      if (boundary_file.empty() == svd_shape.empty()) {
        throw Error("give exactly one of --boundary or --shape");
      }
      const BoundaryPolyline boundary =
          svd_shape.empty() ? read_boundary(boundary_file) : named_shape(svd_shape, nodes);
      const ScanGeometry geom =
          ScanGeometry::covering(boundary_radius(boundary) * (1.0 + 1e-9), cfg.scan_angles,
                                 cfg.ray_spacing, cfg.scan_span_deg * std::numbers::pi / 180.0);
      const BoundarySystem system = assemble_system(geom, boundary);
      const SvdReport rep = svd_report(system, !no_vectors);
      const auto& s = rep.singular_values;
      const Eigen::Index nz = s.size() - static_cast<Eigen::Index>(rep.near_zero);
      std::cout << std::setprecision(6) << "rows: " << system.rows.size()
                << "\nunknowns: " << 2 * boundary.node_count()
                << "\ncomponents: " << boundary.component_count()
                << "\nnear-zero: " << rep.near_zero << '\n';
      if (nz > 0) {
        std::cout << "nonzero sigma range: [" << s(nz - 1) << ", " << s(0) << "]\n"
                  << "condition number: " << rep.condition_number << '\n';
      }
      write_singular_values_csv(dir / "svd_singular_values.csv", s);
      if (!no_vectors) write_null_vectors_csv(dir / "svd_null_vectors.csv", boundary, rep.null_vectors);
      PlotSeries series{"sigma", {}, {}};
      for (Eigen::Index k = 0; k < s.size(); ++k) {
        series.x.push_back(static_cast<double>(k));
        series.y.push_back(std::max(s(k), 1e-300));
      }
      PlotSpec spec{"Singular values of the boundary system", "index", "sigma", true, true};
      std::ofstream(dir / "svd_singular_values.svg") << line_plot_svg(spec, {series});
    } else if (*conv) {
      stage = "converge";
      const BoundaryPolyline boundary =
          boundary_file.empty() ? make_disk(1000) : read_boundary(boundary_file);
      const Grid2 grid = Grid2::square(cfg.grid_n, cfg.grid_extent);
      const SymTensorField2 truth = airy_phantom(grid, boundary, cfg.elastic).strain;
      std::vector<int> counts;
      for (double c : parse_list(counts_text)) counts.push_back(static_cast<int>(c));
      const auto cases = converge_study(cfg, boundary, truth, counts, parse_list(meshes_text),
                                        cfg.noise_level, cfg.noise_seed);
      std::cout << "n_angles,target_h,e\n" << std::setprecision(6);
      for (const auto& c : cases) {
        std::cout << c.n_angles << ',' << c.mesh_h << ',' << c.relative_error << '\n';
      }
      std::cout << "wrote " << (dir / "converge.csv").string() << '\n';
    }
  } catch (const StageError& e) {
    std::cerr << "error [" << stage << "] " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error [" << stage << "]: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace straintomo
