#pragma once

#include <cmath>

namespace nvpol {

inline constexpr double kPi = 3.14159265358979323846;

// Physical constants for the NV / carbon-13 system.
//
// Unit conventions used throughout the library:
//  * couplings and dressed frequencies: rad/us (angular),
//  * times: us,
//  * magnetic field: gauss at every interface, tesla internally,
//  * distances: nm.
//
// The Larmor frequency entering the per-spin closed forms follows the
// convention of the embedded reference coupling table (see
// environment.hpp): omega[1/us] = (gamma_n / 2pi) * B, i.e. 10.71 MHz/T
// expressed per microsecond. This is what makes the tabulated couplings
// and the field scale consistent with each other.
struct PhysicalConstants {
  double gamma_e = 2.0 * kPi * 28.08e9;   // electron gyromagnetic ratio, rad s^-1 T^-1
  double gamma_n = 2.0 * kPi * 10.71e6;   // 13C nuclear gyromagnetic ratio, rad s^-1 T^-1
  double mu0_over_4pi = 1.0e-7;           // T m A^-1
  double hbar = 1.0545718e-34;            // J s
  double lattice_constant = 0.357;        // diamond conventional cell edge, nm
  double c13_abundance = 0.011;           // natural 13C fraction (documentation only;
                                          // the site generator samples sites uniformly)

  // Dipolar prefactor C(r) = mu0/4pi * hbar * gamma_e * gamma_n / r^3,
  // returned in rad/us for r in nm. C(1 nm) = 0.12520522840 rad/us.
  double dipolar_prefactor(double r_nm) const {
    const double r_m = r_nm * 1e-9;
    const double c_rad_per_s = mu0_over_4pi * hbar * gamma_e * gamma_n / (r_m * r_m * r_m);
    return c_rad_per_s * 1e-6;
  }

  // Larmor frequency in 1/us for a field given in gauss (see header comment).
  double larmor_per_us(double b_gauss) const {
    const double b_tesla = b_gauss * 1e-4;
    return gamma_n / (2.0 * kPi) * b_tesla * 1e-6;
  }
};

}  // namespace nvpol
