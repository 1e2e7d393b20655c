#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "tcl/cli.hpp"

namespace tcl::cli {

namespace {

std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  return m.line >= 0 ? "line " + std::to_string(m.line + 1) : "config";
}

void check_keys(const YAML::Node& map, const std::string& section, const std::set<std::string>& allowed) {
  if (!map.IsMap()) throw ConfigError(where(map) + ": section '" + section + "' must be a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError(where(kv.first) + ": unknown key '" + key + "' in " + section + " (allowed: " + list + ")");
    }
  }
}

template <class T>
void read(const YAML::Node& map, const char* key, T& out, const std::string& section) {
  const auto n = map[key];
  if (!n) return;
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where(n) + ": " + section + "." + key + " has the wrong type");
  }
}

void read_region(const YAML::Node& n, RegionConfig& r, const std::string& section) {
  if (!n) return;
  check_keys(n, section, {"re_min", "re_max", "im_min", "im_max", "scan_nx", "scan_ny", "polish_tol"});
  read(n, "re_min", r.re_min, section);
  read(n, "re_max", r.re_max, section);
  read(n, "im_min", r.im_min, section);
  read(n, "im_max", r.im_max, section);
  read(n, "scan_nx", r.scan_nx, section);
  read(n, "scan_ny", r.scan_ny, section);
  read(n, "polish_tol", r.polish_tol, section);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

void check_region(const RegionConfig& r, const std::string& name) {
  require(r.re_min < r.re_max && r.im_min < r.im_max, name + " needs re_min < re_max and im_min < im_max");
  require(r.scan_nx >= 2 && r.scan_ny >= 2, name + " scan needs at least 2 points per axis");
  require(r.polish_tol > 0, name + ".polish_tol must be positive");
}

void emit_region(YAML::Emitter& e, const char* name, const RegionConfig& r) {
  e << YAML::Key << name << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "re_min" << YAML::Value << r.re_min;
  e << YAML::Key << "re_max" << YAML::Value << r.re_max;
  e << YAML::Key << "im_min" << YAML::Value << r.im_min;
  e << YAML::Key << "im_max" << YAML::Value << r.im_max;
  e << YAML::Key << "scan_nx" << YAML::Value << r.scan_nx;
  e << YAML::Key << "scan_ny" << YAML::Value << r.scan_ny;
  e << YAML::Key << "polish_tol" << YAML::Value << r.polish_tol;
  e << YAML::EndMap;
}

}  // namespace

specfun::RootSearchRegion RegionConfig::region() const {
  return {re_min, re_max, im_min, im_max, scan_nx, scan_ny, polish_tol};
}

void ExperimentConfig::validate() const {
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: params: ") + e.what());
  }
  require(grid.cells_per_deadband >= 2, "grid.cells_per_deadband must be at least 2");
  require(fp.dt > 0 && fp.t_end > 0, "fp.dt and fp.t_end must be positive");
  require(fp.output_every >= 0, "fp.output_every must be non-negative");
  require(fp.scheme == "bdf2" || fp.scheme == "backward_euler", "fp.scheme must be bdf2 or backward_euler");
  require(fp.mass_tol > 0, "fp.mass_tol must be positive");
  require(fp.fit_start >= 0 && fp.fit_start < fp.t_end, "fp.fit_start must lie in [0, fp.t_end)");
  require(fp.initial.width > 0, "fp.initial.width must be positive");
  require(fp.initial.up_fraction >= 0 && fp.initial.up_fraction <= 1, "fp.initial.up_fraction must lie in [0, 1]");
  require(mc.n_devices > 0, "mc.n_devices must be positive");
  require(mc.dt > 0 && mc.t_end > 0, "mc.dt and mc.t_end must be positive");
  for (double t : mc.snapshots) require(t >= 0 && t <= mc.t_end, "mc.snapshots must lie in [0, mc.t_end]");
  require(mc.threads >= 0, "mc.threads must be non-negative");
  require(mc.histogram_cells >= 1, "mc.histogram_cells must be positive");
  require(mc.start == "reference" || mc.start == "gaussian", "mc.start must be reference or gaussian");
  check_region(spectrum.hard, "spectrum.hard");
  check_region(spectrum.soft, "spectrum.soft");
  check_region(spectrum.toy, "spectrum.toy");
  require(spectrum.toy_rate > 0, "spectrum.toy_rate must be positive");
  require(spectrum.toy_family >= 0, "spectrum.toy_family must be non-negative");
  require(cycles.t_max > 0 && cycles.t_points >= 2, "cycles.t_max must be positive and cycles.t_points >= 2");
  require(cycles.n_max >= 1, "cycles.n_max must be positive");
  require(cycles.omega_points >= 3, "cycles.omega_points must be at least 3");
  require(cycles.out_time_max > 0 && cycles.out_time_points >= 2, "cycles.out_time_* out of range");
  require(!output_dir.empty(), "output_dir must not be empty");
}

ExperimentConfig parse_config_string(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  ExperimentConfig c;
  if (!root || root.IsNull()) {
    c.validate();
    return c;
  }
  check_keys(root, "top level", {"params", "grid", "fp", "mc", "spectrum", "cycles", "validate", "output_dir"});

  if (const auto n = root["params"]) {
    check_keys(n, "params", {"x_minus", "x_down", "x_up", "x_plus", "tau", "kappa", "rate", "hard"});
    read(n, "x_minus", c.params.x_minus, "params");
    read(n, "x_down", c.params.x_down, "params");
    read(n, "x_up", c.params.x_up, "params");
    read(n, "x_plus", c.params.x_plus, "params");
    read(n, "tau", c.params.tau, "params");
    read(n, "kappa", c.params.kappa, "params");
    read(n, "rate", c.params.rate, "params");
    read(n, "hard", c.params.hard, "params");
  }
  if (const auto n = root["grid"]) {
    check_keys(n, "grid", {"cells_per_deadband"});
    read(n, "cells_per_deadband", c.grid.cells_per_deadband, "grid");
  }
  if (const auto n = root["fp"]) {
    check_keys(n, "fp", {"dt", "t_end", "output_every", "scheme", "mass_tol", "fit_start", "initial"});
    read(n, "dt", c.fp.dt, "fp");
    read(n, "t_end", c.fp.t_end, "fp");
    read(n, "output_every", c.fp.output_every, "fp");
    read(n, "scheme", c.fp.scheme, "fp");
    read(n, "mass_tol", c.fp.mass_tol, "fp");
    read(n, "fit_start", c.fp.fit_start, "fp");
    if (const auto i = n["initial"]) {
      check_keys(i, "fp.initial", {"x0", "width", "up_fraction"});
      read(i, "x0", c.fp.initial.x0, "fp.initial");
      read(i, "width", c.fp.initial.width, "fp.initial");
      read(i, "up_fraction", c.fp.initial.up_fraction, "fp.initial");
    }
  }
  if (const auto n = root["mc"]) {
    check_keys(n, "mc", {"n_devices", "seed", "dt", "t_end", "snapshots", "threads", "histogram_cells", "start"});
    read(n, "n_devices", c.mc.n_devices, "mc");
    read(n, "seed", c.mc.seed, "mc");
    read(n, "dt", c.mc.dt, "mc");
    read(n, "t_end", c.mc.t_end, "mc");
    read(n, "snapshots", c.mc.snapshots, "mc");
    read(n, "threads", c.mc.threads, "mc");
    read(n, "histogram_cells", c.mc.histogram_cells, "mc");
    read(n, "start", c.mc.start, "mc");
  }
  if (const auto n = root["spectrum"]) {
    check_keys(n, "spectrum", {"hard", "soft", "toy", "toy_rate", "toy_family"});
    read_region(n["hard"], c.spectrum.hard, "spectrum.hard");
    read_region(n["soft"], c.spectrum.soft, "spectrum.soft");
    read_region(n["toy"], c.spectrum.toy, "spectrum.toy");
    read(n, "toy_rate", c.spectrum.toy_rate, "spectrum");
    read(n, "toy_family", c.spectrum.toy_family, "spectrum");
  }
  if (const auto n = root["cycles"]) {
    check_keys(n, "cycles", {"t_max", "t_points", "n_max", "omega_points", "out_time_max", "out_time_points"});
    read(n, "t_max", c.cycles.t_max, "cycles");
    read(n, "t_points", c.cycles.t_points, "cycles");
    read(n, "n_max", c.cycles.n_max, "cycles");
    read(n, "omega_points", c.cycles.omega_points, "cycles");
    read(n, "out_time_max", c.cycles.out_time_max, "cycles");
    read(n, "out_time_points", c.cycles.out_time_points, "cycles");
  }
  if (const auto n = root["validate"]) {
    check_keys(n, "validate", {"criteria"});
    read(n, "criteria", c.validate_criteria, "validate");
  }
  read(root, "output_dir", c.output_dir, "top level");
  c.validate();
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_string(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string serialize_config(const ExperimentConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "x_minus" << YAML::Value << c.params.x_minus;
  e << YAML::Key << "x_down" << YAML::Value << c.params.x_down;
  e << YAML::Key << "x_up" << YAML::Value << c.params.x_up;
  e << YAML::Key << "x_plus" << YAML::Value << c.params.x_plus;
  e << YAML::Key << "tau" << YAML::Value << c.params.tau;
  e << YAML::Key << "kappa" << YAML::Value << c.params.kappa;
  e << YAML::Key << "rate" << YAML::Value << c.params.rate;
  e << YAML::Key << "hard" << YAML::Value << c.params.hard;
  e << YAML::EndMap;

  e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "cells_per_deadband" << YAML::Value << c.grid.cells_per_deadband;
  e << YAML::EndMap;

  e << YAML::Key << "fp" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dt" << YAML::Value << c.fp.dt;
  e << YAML::Key << "t_end" << YAML::Value << c.fp.t_end;
  e << YAML::Key << "output_every" << YAML::Value << c.fp.output_every;
  e << YAML::Key << "scheme" << YAML::Value << c.fp.scheme;
  e << YAML::Key << "mass_tol" << YAML::Value << c.fp.mass_tol;
  e << YAML::Key << "fit_start" << YAML::Value << c.fp.fit_start;
  e << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "x0" << YAML::Value << c.fp.initial.x0;
  e << YAML::Key << "width" << YAML::Value << c.fp.initial.width;
  e << YAML::Key << "up_fraction" << YAML::Value << c.fp.initial.up_fraction;
  e << YAML::EndMap << YAML::EndMap;

  e << YAML::Key << "mc" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "n_devices" << YAML::Value << c.mc.n_devices;
  e << YAML::Key << "seed" << YAML::Value << c.mc.seed;
  e << YAML::Key << "dt" << YAML::Value << c.mc.dt;
  e << YAML::Key << "t_end" << YAML::Value << c.mc.t_end;
  e << YAML::Key << "snapshots" << YAML::Value << YAML::Flow << c.mc.snapshots;
  e << YAML::Key << "threads" << YAML::Value << c.mc.threads;
  e << YAML::Key << "histogram_cells" << YAML::Value << c.mc.histogram_cells;
  e << YAML::Key << "start" << YAML::Value << c.mc.start;
  e << YAML::EndMap;

  e << YAML::Key << "spectrum" << YAML::Value << YAML::BeginMap;
  emit_region(e, "hard", c.spectrum.hard);
  emit_region(e, "soft", c.spectrum.soft);
  emit_region(e, "toy", c.spectrum.toy);
  e << YAML::Key << "toy_rate" << YAML::Value << c.spectrum.toy_rate;
  e << YAML::Key << "toy_family" << YAML::Value << c.spectrum.toy_family;
  e << YAML::EndMap;

  e << YAML::Key << "cycles" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "t_max" << YAML::Value << c.cycles.t_max;
  e << YAML::Key << "t_points" << YAML::Value << c.cycles.t_points;
  e << YAML::Key << "n_max" << YAML::Value << c.cycles.n_max;
  e << YAML::Key << "omega_points" << YAML::Value << c.cycles.omega_points;
  e << YAML::Key << "out_time_max" << YAML::Value << c.cycles.out_time_max;
  e << YAML::Key << "out_time_points" << YAML::Value << c.cycles.out_time_points;
  e << YAML::EndMap;

  e << YAML::Key << "validate" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "criteria" << YAML::Value << YAML::Flow << c.validate_criteria;
  e << YAML::EndMap;

  e << YAML::Key << "output_dir" << YAML::Value << YAML::DoubleQuoted << c.output_dir;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = serialize_config(cfg);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace tcl::cli
