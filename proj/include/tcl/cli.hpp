#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcl/core.hpp"
#include "tcl/specfun.hpp"

namespace tcl::cli {

// Parse or validation problem; the message names the line or the invariant.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InitialConfig {
  double x0 = 0.0;
  double width = 0.1;
  double up_fraction = 0.7;
  bool operator==(const InitialConfig&) const = default;
};

struct GridConfig {
  int cells_per_deadband = 100;
  bool operator==(const GridConfig&) const = default;
};

struct FpConfig {
  double dt = 0.005;
  double t_end = 20.0;
  int output_every = 200;  // steps between density frames
  std::string scheme = "bdf2";
  double mass_tol = 1e-9;
  double fit_start = 4.0;  // window of the relaxation fit
  InitialConfig initial;
  bool operator==(const FpConfig&) const = default;
};

struct McConfig {
  int n_devices = 10000;
  std::uint64_t seed = 20240601;
  double dt = 0.01;
  double t_end = 20.0;
  std::vector<double> snapshots{20.0};
  int threads = 0;
  int histogram_cells = 20;  // cells per deadband of the snapshot histograms
  std::string start = "reference";  // or "gaussian" (uses fp.initial)
  bool operator==(const McConfig&) const = default;
};

struct RegionConfig {
  double re_min = -0.1;
  double re_max = 8.0;
  double im_min = -8.0;
  double im_max = 8.0;
  int scan_nx = 48;
  int scan_ny = 48;
  double polish_tol = 1e-10;
  bool operator==(const RegionConfig&) const = default;
  specfun::RootSearchRegion region() const;
};

struct SpectrumConfig {
  RegionConfig hard;
  RegionConfig soft{-0.1, 3.3, -8.1, 8.1, 48, 48, 1e-12};
  RegionConfig toy{-4.55, 0.5, -20.0, 20.0, 48, 48, 1e-12};
  double toy_rate = 0.1;
  int toy_family = 40;
  bool operator==(const SpectrumConfig&) const = default;
};

struct CyclesConfig {
  double t_max = 10.0;   // in units of t_dc
  int t_points = 41;
  int n_max = 40;
  int omega_points = 50;
  double out_time_max = 6.0;
  int out_time_points = 121;
  bool operator==(const CyclesConfig&) const = default;
};

struct ExperimentConfig {
  TclParams params = canonical_params();
  GridConfig grid;
  FpConfig fp;
  McConfig mc;
  SpectrumConfig spectrum;
  CyclesConfig cycles;
  std::vector<int> validate_criteria;  // empty: all
  std::string output_dir = "tcl-lab-out";
  bool operator==(const ExperimentConfig&) const = default;

  // Throws ConfigError naming the violated invariant.
  void validate() const;
};

ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);
// Every key written, doubles with 17 significant digits.
std::string serialize_config(const ExperimentConfig& cfg);
// SHA-256 of the serialized config, hex.
std::string config_hash(const ExperimentConfig& cfg);

const std::vector<std::string>& subcommands();

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // beats TCL_LAB_OUT_DIR, which beats the config
  std::optional<std::uint64_t> seed;
  bool echo = true;  // print progress and tables on stdout
};

struct RunResult {
  int exit_code = 0;
  std::filesystem::path directory;
  std::vector<std::string> files;
};

// Writes the CSV outputs and manifest.txt into <out>/<subcommand>.  Exit code 0 on success,
// 1 when a validation check failed, 2 on an error (status=failed, or partial if some files were written).
RunResult run(const std::string& subcommand, const ExperimentConfig& cfg, const RunOptions& opt = {});

// Header of each CSV written by run, keyed by file name.
const std::vector<std::pair<std::string, std::string>>& csv_schemas();

}  // namespace tcl::cli
