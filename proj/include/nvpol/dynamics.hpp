#pragma once

#include <complex>
#include <vector>

#include "nvpol/environment.hpp"
#include "nvpol/errors.hpp"

namespace nvpol::dyn {

using Complex = std::complex<double>;

// Precomputed per-spin frequencies: the Larmor frequency omega, the dressed
// frequency omega_k = sqrt(ax^2 + ay^2 + (omega+az)^2) of the nucleus under
// field plus hyperfine coupling, and the transverse coupling strength
// perp_sq = ax^2 + ay^2.
struct SpinFrequencies {
  double omega = 0.0;
  double omega_k = 0.0;
  double perp_sq = 0.0;

  SpinFrequencies() = default;
  SpinFrequencies(const env::CouplingRow& row, double omega);
};

// Per-spin coherence factor for the branch prepared in the decoupled
// pointer state: only the measurement interval t enters.
Complex l0(const env::CouplingRow& row, double p, double omega, double t);

// Conditional-evolution overlap factor
//   C_k(tau, t) = -2 (perp^2/omega_k^2) sin(omega_k tau/2) sin(omega t/2)
//                  sin(omega_k (tau+t)/2);
// vanishes when the transverse coupling or the preparation interval does.
double c_k(const env::CouplingRow& row, double omega, double tau, double t);

// Factor for the branch prepared in the coupled pointer state:
// l1 = l0 - i p c_k.
Complex l1(const env::CouplingRow& row, double p, double omega, double tau, double t);

// Qubit coherence for preparation branch 0 or 1: one half times the product
// of the per-spin factors. Branch 0 is independent of tau (the decoupled
// pointer state leaves the bath alone during preparation).
Complex coherence_branch(const env::Environment& e, int branch, double tau, double t);

// Coherence difference between the two preparation branches. Production
// path is the telescoped sum
//   1/2 sum_m i p_m C_m prod_{n<m} L_n^(0) prod_{k>m} L_k^(1),
// which avoids the catastrophic cancellation of subtracting two near-equal
// products at large N. delta_rho_product is the direct product-difference
// form, kept as an independent self-check path.
Complex delta_rho(const env::Environment& e, double tau, double t);
Complex delta_rho_product(const env::Environment& e, double tau, double t);

// Sampled surface over a (tau, t) grid, values indexed [i_tau][i_t]
// row-major.
struct CoherenceSurface {
  std::vector<double> tau_grid;
  std::vector<double> t_grid;
  std::vector<Complex> values;  // row-major, tau outer

  const Complex& at(std::size_t i_tau, std::size_t i_t) const {
    return values[i_tau * t_grid.size() + i_t];
  }
};

// Evaluates delta_rho on the grid. Grids must be nonempty, ascending and
// nonnegative (GridInvalid otherwise). Rows are distributed over worker
// threads; the thread count comes from the NVPOL_THREADS environment
// variable (0 or unset = hardware concurrency) and results are written by
// index, so output is independent of scheduling.
CoherenceSurface delta_surface(const env::Environment& e,
                               const std::vector<double>& tau_grid,
                               const std::vector<double>& t_grid);

// Evenly spaced grid helper: points values from min to max inclusive.
std::vector<double> linspace(double min, double max, std::size_t points);

// CSV surface contract: comment lines passed through verbatim (each written
// as "# <line>"), then "tau_us,t_us,re,im,abs" and one row per grid point in
// row-major order, 12 significant digits.
void write_surface_csv(const CoherenceSurface& s, const std::string& path,
                       const std::vector<std::string>& header_comments);

}  // namespace nvpol::dyn
