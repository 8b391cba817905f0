#pragma once

#include <complex>

#include <Eigen/Dense>

#include "nvpol/environment.hpp"
#include "nvpol/errors.hpp"

namespace nvpol::oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Hard caps: the tensor-product path holds a 2^N x 2^N complex matrix
// (N = 12 is a 64 MB propagator pair); the generic eigendecomposition path
// is O(8^N) and capped tighter.
inline constexpr std::size_t kMaxSpins = 12;
inline constexpr std::size_t kMaxSpinsDense = 6;

// Full environment density operator (2^N dimensional).
struct DenseState {
  std::size_t n_spins = 0;
  Matrix rho;  // Hermitian, unit trace, PSD

  std::size_t dim() const { return static_cast<std::size_t>(rho.rows()); }
};

// Conditional bath propagators for the two pointer states at a fixed time:
// w0 generated by the bare Larmor Hamiltonian, w1 additionally by the
// hyperfine rows.
struct ConditionalPropagators {
  Matrix w0;
  Matrix w1;
  double t = 0.0;
};

// Tensor product of per-spin diag((1+p)/2, (1-p)/2) states.
DenseState build_initial_state(const env::Environment& e);

// Per-spin closed-form spin-1/2 rotations
//   exp(-i (h.I) t) = cos(|h| t/2) 1 - i sin(|h| t/2) (hhat . sigma),
// tensored in environment order (first spin = most significant axis).
ConditionalPropagators build_propagators(const env::Environment& e, double t);

// Same propagators via generic Hermitian eigendecomposition of the full
// 2^N Hamiltonian; independent of the rotation closed form. N <= 6.
ConditionalPropagators build_propagators_dense(const env::Environment& e, double t);

// Literal two-stage protocol: conjugate the initial state by the branch
// propagator over the preparation interval tau, then take
// 1/2 Tr(w0(t) rho w1(t)^dagger) for the measurement interval t.
Complex prepared_coherence(const env::Environment& e, int branch, double tau, double t);

// prepared_coherence(0) - prepared_coherence(1): the brute-force value the
// closed-form delta_rho must match.
Complex oracle_delta(const env::Environment& e, double tau, double t);

}  // namespace nvpol::oracle
