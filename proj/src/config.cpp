#include "straintomo/config.hpp"

#include <charconv>
#include <fstream>
#include <set>

namespace straintomo {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "grid.n",      "grid.extent", "scan.angles", "scan.span_deg", "scan.ray_spacing",
      "elastic.E",   "elastic.nu",  "elastic.regime", "mesh.h",      "svd.cutoff",
      "noise.level", "noise.seed",  "io.outdir",   "io.boundary",   "io.sinogram",
      "io.truth"};
  return keys;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  cfg.source_ = source;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw Error(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw Error(where + ": empty key or value");
    if (cfg.values_.contains(key)) throw Error(where + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  return parse(in, path.string());
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(source_ + ": key '" + key + "' expects a number, got '" + s + "'");
  }
  return v;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(source_ + ": key '" + key + "' expects an integer, got '" + s + "'");
  }
  return v;
}

void ReconstructionConfig::validate() const {
  if (grid_n < 2) throw Error("config: grid.n must be at least 2");
  if (!(grid_extent > 0.0)) throw Error("config: grid.extent must be positive");
  if (scan_angles < 1) throw Error("config: scan.angles must be at least 1");
  if (!(scan_span_deg > 0.0 && scan_span_deg <= 360.0)) {
    throw Error("config: scan.span_deg must lie in (0, 360]");
  }
  if (!(ray_spacing > 0.0)) throw Error("config: scan.ray_spacing must be positive");
  elastic.validate();
  if (!(mesh_h > 0.0)) throw Error("config: mesh.h must be positive");
  if (!(svd_cutoff >= 0.0 && svd_cutoff < 1.0)) throw Error("config: svd.cutoff must lie in [0, 1)");
  if (!(noise_level >= 0.0)) throw Error("config: noise.level must be non-negative");
}

ReconstructionConfig make_config(const KeyValueConfig& kv, ReconstructionConfig c) {
  for (const auto& [key, value] : kv.values()) {
    if (!known_keys().contains(key)) throw Error("config: unknown key '" + key + "'");
  }
  c.grid_n = static_cast<int>(kv.get_int("grid.n", c.grid_n));
  c.grid_extent = kv.get_double("grid.extent", c.grid_extent);
  c.scan_angles = static_cast<int>(kv.get_int("scan.angles", c.scan_angles));
  c.scan_span_deg = kv.get_double("scan.span_deg", c.scan_span_deg);
  c.ray_spacing = kv.get_double("scan.ray_spacing", c.ray_spacing);
  c.elastic.E = kv.get_double("elastic.E", c.elastic.E);
  c.elastic.nu = kv.get_double("elastic.nu", c.elastic.nu);
  if (kv.has("elastic.regime")) {
    const std::string r = kv.get_string("elastic.regime", "");
    if (r == "plane_stress") {
      c.elastic.regime = ElasticRegime::plane_stress;
    } else if (r == "plane_strain") {
      c.elastic.regime = ElasticRegime::plane_strain;
    } else {
      throw Error("config: elastic.regime must be plane_stress or plane_strain");
    }
  }
  c.mesh_h = kv.get_double("mesh.h", c.mesh_h);
  c.svd_cutoff = kv.get_double("svd.cutoff", c.svd_cutoff);
  c.noise_level = kv.get_double("noise.level", c.noise_level);
  const long long seed = kv.get_int("noise.seed", static_cast<long long>(c.noise_seed));
  if (seed < 0) throw Error("config: noise.seed must be non-negative");
  c.noise_seed = static_cast<std::uint64_t>(seed);
  c.outdir = kv.get_string("io.outdir", c.outdir.string());
  c.boundary_file = kv.get_string("io.boundary", c.boundary_file.string());
  c.sinogram_file = kv.get_string("io.sinogram", c.sinogram_file.string());
  c.truth_file = kv.get_string("io.truth", c.truth_file.string());
  c.validate();
  return c;
}

}  // namespace straintomo
