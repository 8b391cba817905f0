#include "nvpol/oracle.hpp"

#include <cmath>

namespace nvpol::oracle {

namespace {

using Matrix2 = Eigen::Matrix2cd;

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// exp(-i (h.I) t) for spin-1/2 (I = sigma/2), closed form.
Matrix2 spin_rotation(double hx, double hy, double hz, double t) {
  const double h = std::sqrt(hx * hx + hy * hy + hz * hz);
  Matrix2 u = Matrix2::Identity();
  if (h == 0.0) return u;
  const double c = std::cos(0.5 * h * t);
  const double s = std::sin(0.5 * h * t);
  const double nx = hx / h, ny = hy / h, nz = hz / h;
  const Complex I(0.0, 1.0);
  u(0, 0) = c - I * s * nz;
  u(0, 1) = -I * s * (nx - I * ny);
  u(1, 0) = -I * s * (nx + I * ny);
  u(1, 1) = c + I * s * nz;
  return u;
}

void check_size(const env::Environment& e, std::size_t cap, const char* what) {
  if (e.spins.empty()) throw OutOfRange(std::string(what) + ": empty environment");
  if (e.spins.size() > cap)
    throw TooLarge(std::string(what) + ": N = " + std::to_string(e.spins.size()) +
                   " exceeds the cap of " + std::to_string(cap));
}

}  // namespace

DenseState build_initial_state(const env::Environment& e) {
  check_size(e, kMaxSpins, "build_initial_state");
  Matrix rho = Matrix::Ones(1, 1);
  for (const auto& s : e.spins) {
    Matrix2 single = Matrix2::Zero();
    single(0, 0) = 0.5 * (1.0 + s.polarization);
    single(1, 1) = 0.5 * (1.0 - s.polarization);
    rho = kron(rho, single);
  }
  DenseState st;
  st.n_spins = e.spins.size();
  st.rho = std::move(rho);
  return st;
}

ConditionalPropagators build_propagators(const env::Environment& e, double t) {
  check_size(e, kMaxSpins, "build_propagators");
  if (!(t >= 0.0)) throw OutOfRange("build_propagators: t must be >= 0");
  const double omega = e.omega();
  Matrix w0 = Matrix::Ones(1, 1);
  Matrix w1 = Matrix::Ones(1, 1);
  for (const auto& s : e.spins) {
    w0 = kron(w0, spin_rotation(0.0, 0.0, omega, t));
    w1 = kron(w1, spin_rotation(s.coupling.ax, s.coupling.ay, omega + s.coupling.az, t));
  }
  return ConditionalPropagators{std::move(w0), std::move(w1), t};
}

ConditionalPropagators build_propagators_dense(const env::Environment& e, double t) {
  check_size(e, kMaxSpinsDense, "build_propagators_dense");
  if (!(t >= 0.0)) throw OutOfRange("build_propagators_dense: t must be >= 0");
  const double omega = e.omega();
  const std::size_t n = e.spins.size();
  const std::size_t dim = std::size_t{1} << n;

  // Assemble H0 = sum_k omega Iz_k and H1 = H0 + sum_k (ax Ix + ay Iy + az Iz)_k
  // as explicit 2^N matrices, then exponentiate via eigendecomposition.
  const Complex I(0.0, 1.0);
  Matrix2 sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, -I, I, 0;
  sz << 1, 0, 0, -1;

  Matrix h0 = Matrix::Zero(dim, dim);
  Matrix h1 = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < n; ++k) {
    Matrix term0 = Matrix::Ones(1, 1);
    Matrix term1 = Matrix::Ones(1, 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) {
        const auto& row = e.spins[k].coupling;
        term0 = kron(term0, 0.5 * omega * sz);
        term1 = kron(term1, 0.5 * (row.ax * sx + row.ay * sy + (omega + row.az) * sz));
      } else {
        term0 = kron(term0, Matrix2::Identity());
        term1 = kron(term1, Matrix2::Identity());
      }
    }
    h0 += term0;
    h1 += term1;
  }

  auto expm = [&](const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const auto& vals = es.eigenvalues();
    const Matrix& vecs = es.eigenvectors();
    Eigen::VectorXcd phases(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i)
      phases(i) = std::exp(Complex(0.0, -vals(i) * t));
    return Matrix(vecs * phases.asDiagonal() * vecs.adjoint());
  };

  return ConditionalPropagators{expm(h0), expm(h1), t};
}

Complex prepared_coherence(const env::Environment& e, int branch, double tau, double t) {
  check_size(e, kMaxSpins, "prepared_coherence");
  if (branch != 0 && branch != 1) throw OutOfRange("prepared_coherence: branch must be 0 or 1");
  if (!(tau >= 0.0 && t >= 0.0)) throw OutOfRange("prepared_coherence: times must be >= 0");

  const DenseState initial = build_initial_state(e);
  const ConditionalPropagators prep = build_propagators(e, tau);
  const Matrix& w_prep = branch == 0 ? prep.w0 : prep.w1;
  const Matrix rho_tau = w_prep * initial.rho * w_prep.adjoint();

  const ConditionalPropagators meas = build_propagators(e, t);
  return 0.5 * (meas.w0 * rho_tau * meas.w1.adjoint()).trace();
}

Complex oracle_delta(const env::Environment& e, double tau, double t) {
  return prepared_coherence(e, 0, tau, t) - prepared_coherence(e, 1, tau, t);
}

}  // namespace nvpol::oracle
