#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nvpol/environment.hpp"
#include "nvpol/estimator.hpp"
#include "nvpol/errors.hpp"

namespace nvpol::cli {

// Where the spins come from.
struct EnvironmentSource {
  enum class Kind { Table1, File, Generated };
  Kind kind = Kind::Table1;
  std::size_t n = 15;          // Table1: rows kept; Generated: spins drawn
  std::string path;            // File
  std::uint64_t seed = 1;      // Generated
  double shell_min = 0.3;      // Generated, nm
  double shell_max = 1.2;      // Generated, nm

  bool operator==(const EnvironmentSource&) const = default;
};

struct PolarizationSpec {
  enum class Profile { Uniform, Graded, Explicit };
  Profile profile = Profile::Uniform;
  double p = 1.0;                 // Uniform
  double mean = 0.5;              // Graded
  double sigma = 0.261;           // Graded
  std::uint64_t seed = 7;         // Graded
  std::vector<double> values;     // Explicit

  bool operator==(const PolarizationSpec&) const = default;
};

// One run of any subcommand, fully determined by this record (plus the
// subcommand name). Serialized as JSON; `--set key=value` paths use dots
// (e.g. environment.n, tau_grid.points, polarization.p).
struct RunConfig {
  EnvironmentSource environment{};
  double b_z_gauss = 100.0;
  PolarizationSpec polarization{};
  est::GridRange tau_grid{0.0, 100.0, 512};
  est::GridRange t_grid{0.0, 100.0, 512};
  est::Method method = est::Method::TimeDependent;
  double sin_floor = 0.05;
  bool per_tau = false;             // bound: emit the per-tau curve CSV
  std::vector<double> p_list;       // sweep-p
  std::uint64_t seed = 1;           // generic seed (gen-env, validate)
  std::string out;                  // default output path; --out overrides

  bool operator==(const RunConfig&) const = default;
};

// JSON round-trip. to_json emits a single line; parse accepts anything
// nlohmann::json does. Unknown keys are ConfigError (catches typos in
// --set paths and config files).
std::string to_json(const RunConfig& c);
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::string& path);

// Applies one "dotted.path=value" override; value parsed as JSON when
// possible, else taken as a string.
void apply_override(RunConfig& c, const std::string& key_equals_value);

// Materializes the environment: source, then field, then polarization.
env::Environment build_environment(const RunConfig& c);

inline std::vector<double> grid_values(const est::GridRange& g) {
  if (g.points == 0) throw GridInvalid("grid: points must be >= 1");
  if (g.points == 1) return {g.min};
  return dyn::linspace(g.min, g.max, g.points);
}

}  // namespace nvpol::cli
