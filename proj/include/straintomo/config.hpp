#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>

#include "straintomo/elastic.hpp"

namespace straintomo {

/// Flat `key = value` text. '#' starts a comment; blank lines are ignored;
/// a repeated key is an error.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.contains(key); }
  const std::map<std::string, std::string>& values() const { return values_; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
};

/// Run parameters. Lengths share the unit of the boundary coordinates.
struct ReconstructionConfig {
  int grid_n = 222;
  double grid_extent = 1.11;   ///< grid covers [-extent, extent]^2
  int scan_angles = 250;
  double scan_span_deg = 360.0;
  double ray_spacing = 0.01;
  ElasticConstants elastic;
  double mesh_h = 0.03;
  double svd_cutoff = 1e-10;
  double noise_level = 0.0;
  std::uint64_t noise_seed = 1;
  std::filesystem::path outdir = "out";
  /// Optional inputs; empty means "<outdir>/<default name>".
  std::filesystem::path boundary_file;
  std::filesystem::path sinogram_file;
  std::filesystem::path truth_file;

  /// Throws with the offending key on invalid values.
  void validate() const;
};

/// Recognised keys: grid.n, grid.extent, scan.angles, scan.span_deg,
/// scan.ray_spacing, elastic.E, elastic.nu, elastic.regime, mesh.h,
/// svd.cutoff, noise.level, noise.seed, io.outdir, io.boundary,
/// io.sinogram, io.truth. Unknown keys are rejected.
ReconstructionConfig make_config(const KeyValueConfig& kv,
                                 ReconstructionConfig base = ReconstructionConfig{});

}  // namespace straintomo
