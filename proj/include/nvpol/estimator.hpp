#pragma once

#include <string>
#include <vector>

#include "nvpol/dynamics.hpp"
#include "nvpol/environment.hpp"
#include "nvpol/errors.hpp"

namespace nvpol::est {

enum class Method { TimeIndependent, TimeDependent };

std::string method_name(Method m);
Method method_from_name(const std::string& name);  // ConfigError on unknown

struct GridRange {
  double min = 0.0;
  double max = 100.0;
  std::size_t points = 512;

  bool operator==(const GridRange&) const = default;
};

// A lower bound on the mean absolute polarization extracted from a
// coherence-difference surface, with the argmax grid point and enough
// context to audit which grids produced it.
struct BoundEstimate {
  Method method = Method::TimeIndependent;
  double value = 0.0;
  double argmax_tau = 0.0;
  double argmax_t = 0.0;
  std::size_t n_spins = 0;
  double omega = 0.0;            // 1/us
  std::string grid_spec;         // human-readable grid description
  std::size_t clamped_points = 0;  // time-dependent only

  // One-line JSON record {method, value, argmax_tau_us, argmax_t_us,
  // n_spins, omega_rad_per_us, clamped_points, grid_spec}.
  std::string to_json() const;
};

// max |surface| / N over the grid; ties broken toward the smallest
// (i_tau, i_t) pair. Throws EmptySurface.
BoundEstimate bound_time_independent(const dyn::CoherenceSurface& surface,
                                     std::size_t n_spins);

// max |surface| / (N |sin(omega t/2)|) over grid points whose
// |sin(omega t/2)| >= sin_floor, clamped to 1 (clamping counted); same
// tie-break. Throws NonPositiveOmega, AllPointsExcluded, EmptySurface.
BoundEstimate bound_time_dependent(const dyn::CoherenceSurface& surface,
                                   std::size_t n_spins, double omega,
                                   double sin_floor = 0.05);

// Per-tau curve of the same estimate: entry i is the bound restricted to
// row tau_grid[i]. Time-dependent rows with every point excluded yield 0.
std::vector<double> per_tau_curve(const dyn::CoherenceSurface& surface,
                                  std::size_t n_spins, Method method, double omega,
                                  double sin_floor = 0.05);

// Sweep of uniform polarizations: for each p in p_values sets the uniform
// profile on a copy of `base`, evaluates the surface on the given grids and
// returns (mean |p|, bound) pairs in input order.
struct PolarizationPoint {
  double p_actual = 0.0;
  double bound = 0.0;
};
std::vector<PolarizationPoint> bound_vs_polarization(
    const env::Environment& base, const std::vector<double>& p_values, Method method,
    double b_z_gauss, const std::vector<double>& tau_grid,
    const std::vector<double>& t_grid, double sin_floor = 0.05);

// Evaluates the bound for `e` on the given grids and checks it against the
// true mean polarization. A bound above truth (slack 1e-9) is an
// implementation bug, reported as SoundnessViolation.
struct SoundnessReport {
  double bound = 0.0;
  double p_bar = 0.0;
  double slack = 0.0;  // p_bar - bound
};
SoundnessReport soundness_check(const env::Environment& e, Method method,
                                const std::vector<double>& tau_grid,
                                const std::vector<double>& t_grid,
                                double sin_floor = 0.05);

}  // namespace nvpol::est
