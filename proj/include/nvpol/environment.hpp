#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nvpol/constants.hpp"
#include "nvpol/errors.hpp"

namespace nvpol::env {

// Secular hyperfine row (A^{zx}, A^{zy}, A^{zz}) in rad/us: the part of the
// dipolar tensor that couples the qubit's z axis to the nuclear spin.
struct CouplingRow {
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;

  double norm() const;
  bool operator==(const CouplingRow&) const = default;
};

struct NuclearSpin {
  std::optional<std::array<double, 3>> position;  // nm, absent if loaded from couplings
  std::optional<double> r_nm;                     // distance, if known independently
  CouplingRow coupling;
  double polarization = 0.0;  // p in [-1, 1]

  bool operator==(const NuclearSpin&) const = default;
};

// An NV qubit plus its nuclear-spin neighbourhood in a static axial field.
struct Environment {
  std::vector<NuclearSpin> spins;
  double b_z_gauss = 0.0;
  PhysicalConstants constants{};

  std::size_t n() const { return spins.size(); }

  // Larmor frequency in 1/us (see constants.hpp for the convention).
  double omega() const { return constants.larmor_per_us(b_z_gauss); }

  // Mean absolute polarization, the quantity the estimator lower-bounds.
  double mean_abs_polarization() const;

  // First n spins, field and constants preserved.
  Environment truncated(std::size_t n) const;
};

// Dipolar coupling row for a nucleus at `position_nm` relative to the qubit:
//   A^{zj} = -C(r) (delta_zj - 3 rhat_j rhat_z),  C(r) = mu0/4pi hbar ge gn / r^3.
// The sign convention puts an in-plane nucleus (z = 0) at az < 0 and an
// on-axis nucleus at az = +2 C(r).
// Throws DistanceTooSmall below 0.15 nm (closer than a lattice bond),
// NonFinite on non-finite input.
CouplingRow compute_coupling(const std::array<double, 3>& position_nm,
                             const PhysicalConstants& constants = {});

// Deterministically samples `n_spins` distinct carbon sites of the diamond
// lattice (conventional cubic cell, 8-atom basis) with qubit-site distance
// in [shell_min_nm, shell_max_nm], uniformly without replacement; computes
// couplings; polarizations start at 0. Spins are ordered by ascending
// distance. Throws ShellTooSmall when the shell holds fewer than n_spins
// sites.
Environment generate_environment(std::uint64_t seed, std::size_t n_spins,
                                 double shell_min_nm, double shell_max_nm,
                                 const PhysicalConstants& constants = {});

// Polarization profiles for set_polarization.
struct Uniform {
  double p = 0.0;
};
struct Graded {
  double mean = 0.5;
  double sigma = 0.261;
  std::uint64_t seed = 0;
};
struct Explicit {
  std::vector<double> values;
};

// Returns a copy of `e` with polarizations assigned.
//  Uniform: every p_k = p.
//  Graded: draws |p_k| ~ normal(mean, sigma) clipped to [0,1], rescales the
//    clipped draws so their mean equals `mean` exactly, then assigns the
//    values in descending order to spins sorted by descending coupling-row
//    norm (closer / stronger-coupled spins end up more polarized).
//  Explicit: values copied verbatim; length must equal N.
Environment set_polarization(const Environment& e, const Uniform& profile);
Environment set_polarization(const Environment& e, const Graded& profile);
Environment set_polarization(const Environment& e, const Explicit& profile);

// The 15-spin reference environment (tabulated couplings and distances,
// embedded as data and never recomputed from geometry). Polarizations 0,
// field unset.
Environment load_table1();

// Audit of one row against the dipolar row-norm window [C(r), 2 C(r)]:
// any genuine dipolar row at distance r has |A| = C(r) sqrt(1 + 3 cos^2
// theta) inside the window, so a row outside it signals inconsistent units
// or corrupted data.
struct RowAudit {
  std::size_t index = 0;   // 1-based, matching the reference table
  double r_nm = 0.0;
  double row_norm = 0.0;
  double lo = 0.0;         // C(r)
  double hi = 0.0;         // 2 C(r)
  bool pass = false;
};

// Audits every spin that has a known distance (r_nm or position).
std::vector<RowAudit> audit_row_norms(const Environment& e);

// Environment file round-trip (JSON document: {"b_z_gauss": ..,
// "spins": [{"r_nm"?, "position_nm"?, "ax", "ay", "az", "p"}, ...]}).
// Doubles are serialized at full precision (exact round-trip). Loading a
// spin that carries a position recomputes the coupling and requires
// agreement within 1e-9 relative.
std::string to_json(const Environment& e);
Environment environment_from_json(const std::string& text);
void save_environment(const Environment& e, const std::string& path);
Environment load_environment(const std::string& path);

}  // namespace nvpol::env
