#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fvstag/bench.hpp"

namespace fvstag {

// Settings of one `run`. Unset optionals fall back to the case defaults.
struct RunConfig {
  std::string case_name = "taylor-green";
  std::optional<std::string> model;
  int nx = 20;
  std::optional<int> ny;
  std::optional<double> cfl;
  std::optional<double> t_end;
  std::optional<double> c0;
  std::optional<double> mu;
  std::optional<double> cs;
  std::optional<std::string> viscosity;
  double cg_tol = 1e-12;
  std::size_t cg_max_iter = 0;
  bool jacobi = false;
  double jitter = 0.0;
  std::uint64_t seed = 1;
  std::string out = "fvstag-out";
  long write_every = 0;
  bool deterministic = false;
  std::optional<double> dt_max;
  std::optional<std::string> mesh;

  // Assigns one key from its text form. Keys use '_' or '-' interchangeably.
  // Throws ConfigError on unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  static const std::vector<std::string>& keys();
};

// key=value lines; blank lines and '#' comments are ignored.
void apply_config_text(RunConfig& cfg, const std::string& text);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

struct ResolvedRun {
  CaseSpec spec;
  ModelParams prm;
  int nx = 0;
  int ny = 0;
};

// Case defaults overlaid with the config; validates every field.
ResolvedRun resolve(const RunConfig& cfg);

// The mesh of a run: read from cfg.mesh when set, generated otherwise.
Mesh build_mesh(const RunConfig& cfg, const ResolvedRun& r);

// Fully resolved configuration as key=value text (defaults included).
std::string echo_config(const RunConfig& cfg, const ResolvedRun& r);

}  // namespace fvstag
