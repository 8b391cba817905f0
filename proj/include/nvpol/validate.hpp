#pragma once

#include <cstdint>
#include <ostream>

namespace nvpol::validate {

// Randomized validation battery driven by `nvpol validate` (and reused by
// the test suite). Prints one line per suite to `out`; the text is a pure
// function of the arguments, so identical invocations produce
// byte-identical reports. Returns true when every suite passes.
//
// Suites:
//   brute-force-equivalence  closed-form delta vs dense-propagator delta,
//                            `cases` random environments with N <= max_n
//   telescoped-vs-product    the two delta_rho code paths, reference table,
//                            10 x cases random (N, tau, t, p) draws
//   factor-bounds            |l0| <= 1, |l1| <= 1, |c| <= 2,
//                            |c| <= 2 |sin(omega t/2)|, 100 x cases draws
//   propagator-dual-path     tensor-product vs eigendecomposition
//                            propagators, min(cases, 50) environments
//   soundness                bound <= true mean polarization on random
//                            environments, both methods
//
// `corrupt` perturbs the closed-form side's first coupling (negative
// control): the battery must then fail.
bool run_validation(std::size_t max_n, std::size_t cases, std::uint64_t seed,
                    bool corrupt, std::ostream& out);

}  // namespace nvpol::validate
