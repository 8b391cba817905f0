#include "nvpol/validate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <string>

#include "nvpol/dynamics.hpp"
#include "nvpol/environment.hpp"
#include "nvpol/estimator.hpp"
#include "nvpol/oracle.hpp"
#include "nvpol/rng.hpp"

namespace nvpol::validate {

namespace {

std::string format_sci(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 3);
  return std::string(buf, res.ptr);
}

// Random environment with N spins at uniformly random directions and
// distances, random polarizations, random field.
env::Environment random_environment(Rng& rng, std::size_t n, double b_max_gauss) {
  env::Environment e;
  e.b_z_gauss = rng.uniform(0.0, b_max_gauss);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = rng.uniform(0.3, 1.5);
    const double cos_theta = rng.uniform(-1.0, 1.0);
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    const std::array<double, 3> pos = {r * sin_theta * std::cos(phi),
                                       r * sin_theta * std::sin(phi), r * cos_theta};
    env::NuclearSpin s;
    s.position = pos;
    s.r_nm = r;
    s.coupling = env::compute_coupling(pos, e.constants);
    s.polarization = rng.uniform(-1.0, 1.0);
    e.spins.push_back(s);
  }
  return e;
}

void corrupt_coupling(env::Environment& e) {
  e.spins.front().coupling.ax += 1e-6;
}

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_error <= tolerance; }
};

void print_suite(std::ostream& out, const SuiteResult& s) {
  out << "suite " << s.name << ": cases=" << s.cases
      << " max_error=" << format_sci(s.max_error) << " tolerance=" << format_sci(s.tolerance)
      << (s.pass() ? " PASS" : " FAIL") << "\n";
}

}  // namespace

bool run_validation(std::size_t max_n, std::size_t cases, std::uint64_t seed,
                    bool corrupt, std::ostream& out) {
  max_n = std::clamp<std::size_t>(max_n, 1, oracle::kMaxSpins);
  cases = std::max<std::size_t>(cases, 1);
  bool all_pass = true;

  // Closed-form delta against the dense conditional-evolution oracle.
  {
    Rng rng(seed);
    SuiteResult s{"brute-force-equivalence", cases, 0.0, 1e-9};
    for (std::size_t i = 0; i < cases; ++i) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.below(max_n));
      env::Environment e = random_environment(rng, n, 500.0);
      const double tau = rng.uniform(0.0, 200.0);
      const double t = rng.uniform(0.0, 200.0);
      const std::complex<double> reference = oracle::oracle_delta(e, tau, t);
      env::Environment closed = e;
      if (corrupt) corrupt_coupling(closed);
      s.max_error = std::max(s.max_error, std::abs(dyn::delta_rho(closed, tau, t) - reference));
    }
    print_suite(out, s);
    all_pass = all_pass && s.pass();
  }

  // Telescoped sum vs direct product difference on the reference table.
  {
    Rng rng(seed + 1);
    SuiteResult s{"telescoped-vs-product", 10 * cases, 0.0, 1e-12};
    const env::Environment table = env::load_table1();
    for (std::size_t i = 0; i < s.cases; ++i) {
      env::Environment e = table.truncated(1 + rng.below(table.n()));
      e.b_z_gauss = rng.uniform(0.0, 500.0);
      for (auto& spin : e.spins) spin.polarization = rng.uniform(-1.0, 1.0);
      if (corrupt) corrupt_coupling(e);
      const double tau = rng.uniform(0.0, 200.0);
      const double t = rng.uniform(0.0, 200.0);
      s.max_error = std::max(
          s.max_error, std::abs(dyn::delta_rho(e, tau, t) - dyn::delta_rho_product(e, tau, t)));
    }
    print_suite(out, s);
    all_pass = all_pass && s.pass();
  }

  // Per-spin factor bounds.
  {
    Rng rng(seed + 2);
    SuiteResult s{"factor-bounds", 100 * cases, 0.0, 1e-12};
    for (std::size_t i = 0; i < s.cases; ++i) {
      env::CouplingRow row{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0),
                           rng.uniform(-5.0, 5.0)};
      const double p = rng.uniform(-1.0, 1.0);
      const double omega = rng.uniform(0.0, 5.0);
      const double tau = rng.uniform(0.0, 500.0);
      const double t = rng.uniform(0.0, 500.0);
      const double c = dyn::c_k(row, omega, tau, t);
      double excess = std::abs(dyn::l0(row, p, omega, t)) - 1.0;
      excess = std::max(excess, std::abs(dyn::l1(row, p, omega, tau, t)) - 1.0);
      excess = std::max(excess, std::abs(c) - 2.0);
      excess = std::max(excess, std::abs(c) - 2.0 * std::abs(std::sin(0.5 * omega * t)));
      s.max_error = std::max(s.max_error, excess);
    }
    s.max_error = std::max(s.max_error, 0.0);
    print_suite(out, s);
    all_pass = all_pass && s.pass();
  }

  // Tensor-product propagators vs full-Hamiltonian eigendecomposition.
  {
    Rng rng(seed + 3);
    SuiteResult s{"propagator-dual-path", std::min<std::size_t>(cases, 50), 0.0, 1e-12};
    for (std::size_t i = 0; i < s.cases; ++i) {
      const std::size_t n =
          1 + static_cast<std::size_t>(rng.below(std::min(max_n, oracle::kMaxSpinsDense)));
      const env::Environment e = random_environment(rng, n, 500.0);
      const double t = rng.uniform(0.0, 200.0);
      const auto tensor = oracle::build_propagators(e, t);
      const auto dense = oracle::build_propagators_dense(e, t);
      s.max_error = std::max({s.max_error, (tensor.w0 - dense.w0).cwiseAbs().maxCoeff(),
                              (tensor.w1 - dense.w1).cwiseAbs().maxCoeff()});
    }
    print_suite(out, s);
    all_pass = all_pass && s.pass();
  }

  // Bound soundness on random environments, both methods.
  {
    Rng rng(seed + 4);
    SuiteResult s{"soundness", std::max<std::size_t>(cases / 10, 10), 0.0, 1e-9};
    const auto tau_grid = dyn::linspace(0.0, 100.0, 48);
    const auto t_grid = dyn::linspace(0.0, 100.0, 48);
    for (std::size_t i = 0; i < s.cases; ++i) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.below(10));
      env::Environment e = random_environment(rng, n, 500.0);
      if (e.b_z_gauss < 1.0) e.b_z_gauss = 1.0;  // keep the time-dependent method in play
      if (corrupt) corrupt_coupling(e);
      const dyn::CoherenceSurface surf = dyn::delta_surface(e, tau_grid, t_grid);
      const double p_bar = e.mean_abs_polarization();
      const double ti = est::bound_time_independent(surf, e.n()).value;
      const double td = est::bound_time_dependent(surf, e.n(), e.omega(), 0.05).value;
      s.max_error = std::max({s.max_error, ti - p_bar, td - p_bar});
    }
    s.max_error = std::max(s.max_error, 0.0);
    print_suite(out, s);
    all_pass = all_pass && s.pass();
  }

  out << "validation " << (all_pass ? "PASS" : "FAIL") << "\n";
  return all_pass;
}

}  // namespace nvpol::validate
