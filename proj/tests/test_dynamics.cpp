#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "nvpol/dynamics.hpp"
#include "nvpol/environment.hpp"
#include "nvpol/errors.hpp"
#include "nvpol/oracle.hpp"
#include "nvpol/rng.hpp"

using namespace nvpol;
using namespace nvpol::dyn;
using nvpol::env::CouplingRow;
using nvpol::env::Environment;

namespace {

Environment table_env(std::size_t n, double b_gauss, const std::vector<double>& pols) {
  Environment e = env::load_table1().truncated(n);
  e.b_z_gauss = b_gauss;
  REQUIRE(pols.size() == n);
  for (std::size_t k = 0; k < n; ++k) e.spins[k].polarization = pols[k];
  return e;
}

}  // namespace

TEST_CASE("per-spin factors are exactly trivial at t = 0") {
  const CouplingRow row{0.4, -0.2, 0.9};
  for (double p : {-1.0, 0.0, 0.5, 1.0})
    for (double omega : {0.0, 0.02677, 1.071}) {
      const Complex f0 = l0(row, p, omega, 0.0);
      CHECK(f0.real() == 1.0);
      CHECK(f0.imag() == 0.0);
      CHECK(c_k(row, omega, 17.3, 0.0) == 0.0);
      const Complex f1 = l1(row, p, omega, 17.3, 0.0);
      CHECK(f1.real() == 1.0);
      CHECK(f1.imag() == 0.0);
    }
}

TEST_CASE("an uncoupled nucleus never dephases the qubit") {
  const CouplingRow zero{};
  for (double t : {0.7, 12.0, 99.5}) {
    const Complex f = l0(zero, 0.8, 0.1071, t);
    CHECK(f.real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.imag() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(c_k(zero, 0.1071, 5.0, t) == 0.0);
  }
}

TEST_CASE("the dressed-frequency-zero limit is continuous") {
  // ax = ay = 0 and az = -omega freezes the nucleus in the coupled branch:
  // the closed form must degrade to cos - i p sin of the bare half-angle.
  const double omega = 0.45;
  const double p = 0.6, t = 23.0;
  const CouplingRow frozen{0.0, 0.0, -omega};
  const Complex f = l0(frozen, p, omega, t);
  CHECK(f.real() == doctest::Approx(std::cos(0.5 * omega * t)).epsilon(1e-14));
  CHECK(f.imag() == doctest::Approx(-p * std::sin(0.5 * omega * t)).epsilon(1e-14));

  // approaching the degenerate point reproduces its value
  const Complex near = l0(CouplingRow{0.0, 0.0, -omega + 1e-9}, p, omega, t);
  CHECK(std::abs(near - f) < 1e-7);

  // and the conditional overlap vanishes there (no transverse coupling)
  CHECK(c_k(frozen, omega, 11.0, t) == 0.0);
}

TEST_CASE("per-spin factors match the dense oracle for single spins") {
  struct Case {
    std::size_t row;
    double p, b_gauss, tau, t;
  };
  const std::vector<Case> cases = {
      {0, 1.0, 25.0, 5.0, 3.0},
      {1, 0.5, 100.0, 2.0, 7.0},
      {4, -0.8, 250.0, 31.0, 55.0},
      {7, 0.3, 10.0, 80.0, 120.0},
  };
  for (const auto& c : cases) {
    Environment e = env::load_table1().truncated(c.row + 1);
    e.spins.erase(e.spins.begin(), e.spins.end() - 1);  // keep just row `c.row`
    e.b_z_gauss = c.b_gauss;
    e.spins[0].polarization = c.p;
    const double omega = e.omega();
    const auto& row = e.spins[0].coupling;

    const Complex ref0 = 2.0 * oracle::prepared_coherence(e, 0, c.tau, c.t);
    const Complex ref1 = 2.0 * oracle::prepared_coherence(e, 1, c.tau, c.t);
    CHECK(std::abs(l0(row, c.p, omega, c.t) - ref0) < 1e-10);
    CHECK(std::abs(l1(row, c.p, omega, c.tau, c.t) - ref1) < 1e-10);

    // l1 = l0 - i p c with real c ties the three closed forms together
    if (c.p != 0.0) {
      const Complex recovered =
          (l0(row, c.p, omega, c.t) - l1(row, c.p, omega, c.tau, c.t)) / Complex(0.0, c.p);
      CHECK(recovered.real() == doctest::Approx(c_k(row, omega, c.tau, c.t)).epsilon(1e-12));
      CHECK(std::abs(recovered.imag()) < 1e-14);
    }
  }
}

TEST_CASE("both preparation branches start at coherence one half") {
  const Environment e = table_env(5, 25.0, {1.0, -0.6, 0.25, 0.8, -1.0});
  for (int branch : {0, 1}) {
    const Complex v = coherence_branch(e, branch, 12.0, 0.0);
    CHECK(v.real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("an unpolarized bath cannot distinguish the branches") {
  const Environment e = table_env(7, 100.0, {0, 0, 0, 0, 0, 0, 0});
  for (double tau : {0.0, 3.0, 47.0})
    for (double t : {0.0, 9.0, 88.0}) {
      CHECK(coherence_branch(e, 0, tau, t) == coherence_branch(e, 1, tau, t));
      const Complex d = delta_rho(e, tau, t);
      CHECK(d.real() == 0.0);
      CHECK(d.imag() == 0.0);
    }
}

TEST_CASE("branch zero ignores the preparation interval") {
  const Environment e = table_env(4, 50.0, {0.9, 0.1, -0.4, 0.7});
  const Complex base = coherence_branch(e, 0, 0.0, 33.0);
  for (double tau : {1.0, 17.0, 200.0}) CHECK(coherence_branch(e, 0, tau, 33.0) == base);
}

TEST_CASE("single-spin coherence difference is i/2 p C") {
  const Environment e = table_env(1, 25.0, {0.85});
  const double omega = e.omega();
  for (double tau : {2.0, 9.5})
    for (double t : {4.0, 61.0}) {
      const Complex d = delta_rho(e, tau, t);
      const double c = c_k(e.spins[0].coupling, omega, tau, t);
      CHECK(d.real() == 0.0);  // i p C / 2 is purely imaginary
      CHECK(d.imag() == doctest::Approx(0.5 * 0.85 * c).epsilon(1e-15));
    }
}

TEST_CASE("telescoped and product forms of the difference agree") {
  Rng rng(2024);
  const Environment table = env::load_table1();
  for (int i = 0; i < 300; ++i) {
    Environment e = table.truncated(1 + rng.below(table.n()));
    e.b_z_gauss = rng.uniform(0.0, 500.0);
    for (auto& s : e.spins) s.polarization = rng.uniform(-1.0, 1.0);
    const double tau = rng.uniform(0.0, 200.0);
    const double t = rng.uniform(0.0, 200.0);
    CHECK(std::abs(delta_rho(e, tau, t) - delta_rho_product(e, tau, t)) < 1e-12);
  }
}

TEST_CASE("coherence difference matches the dense oracle on the reference rows") {
  const Environment e = table_env(5, 25.0, {1.0, -0.6, 0.25, 0.8, -1.0});
  for (double tau : {1.5, 23.0, 77.0})
    for (double t : {3.0, 50.0, 140.0})
      CHECK(std::abs(delta_rho(e, tau, t) - oracle::oracle_delta(e, tau, t)) < 1e-10);
}

TEST_CASE("flipping every polarization conjugates the difference") {
  Environment e = table_env(6, 80.0, {0.9, -0.3, 0.55, 1.0, -0.75, 0.2});
  Environment flipped = e;
  for (auto& s : flipped.spins) s.polarization = -s.polarization;
  for (double tau : {4.0, 31.0})
    for (double t : {11.0, 96.0}) {
      const Complex d = delta_rho(e, tau, t);
      const Complex df = delta_rho(flipped, tau, t);
      CHECK(df.real() == doctest::Approx(d.real()).epsilon(1e-13));
      CHECK(df.imag() == doctest::Approx(-d.imag()).epsilon(1e-13));
    }
}

TEST_CASE("commensurate frequencies make the factors periodic") {
  // omega = 1 and omega_k = 2 are both integer multiples of g = 1, so every
  // half-angle advances by a multiple of 2 pi over T = 4 pi / g.
  const double omega = 1.0;
  const double az = std::sqrt(3.64) - omega;  // (omega+az)^2 = 3.64
  const CouplingRow row{0.6, 0.0, az};        // omega_k = sqrt(0.36 + 3.64) = 2
  const double period = 4.0 * kPi;
  const double p = 0.7;
  for (double tau : {0.9, 5.2})
    for (double t : {1.3, 8.8}) {
      CHECK(std::abs(l0(row, p, omega, t + period) - l0(row, p, omega, t)) < 1e-12);
      CHECK(c_k(row, omega, tau, t + period) ==
            doctest::Approx(c_k(row, omega, tau, t)).epsilon(1e-12));
      CHECK(c_k(row, omega, tau + period, t) ==
            doctest::Approx(c_k(row, omega, tau, t)).epsilon(1e-12));
    }
}

TEST_CASE("surface evaluation matches pointwise evaluation") {
  const Environment e = table_env(3, 100.0, {0.8, 0.5, -0.9});
  const auto tau_grid = linspace(0.0, 40.0, 7);
  const auto t_grid = linspace(0.0, 60.0, 9);
  const CoherenceSurface s = delta_surface(e, tau_grid, t_grid);
  REQUIRE(s.values.size() == 63);
  for (std::size_t i = 0; i < tau_grid.size(); ++i)
    for (std::size_t j = 0; j < t_grid.size(); ++j)
      CHECK(s.at(i, j) == delta_rho(e, tau_grid[i], t_grid[j]));
  // the tau = 0 row and t = 0 column are identically zero
  for (std::size_t j = 0; j < t_grid.size(); ++j) CHECK(std::abs(s.at(0, j)) == 0.0);
  for (std::size_t i = 0; i < tau_grid.size(); ++i) CHECK(std::abs(s.at(i, 0)) == 0.0);
}

TEST_CASE("surface evaluation is independent of the worker count") {
  const Environment e = table_env(4, 60.0, {1.0, 0.3, -0.5, 0.8});
  const auto tau_grid = linspace(0.0, 30.0, 11);
  const auto t_grid = linspace(0.0, 30.0, 13);

  setenv("NVPOL_THREADS", "1", 1);
  const CoherenceSurface serial = delta_surface(e, tau_grid, t_grid);
  setenv("NVPOL_THREADS", "4", 1);
  const CoherenceSurface parallel = delta_surface(e, tau_grid, t_grid);
  unsetenv("NVPOL_THREADS");

  REQUIRE(serial.values.size() == parallel.values.size());
  for (std::size_t k = 0; k < serial.values.size(); ++k)
    CHECK(serial.values[k] == parallel.values[k]);
}

TEST_CASE("invalid grids are rejected") {
  const Environment e = table_env(1, 100.0, {1.0});
  CHECK_THROWS_AS(delta_surface(e, {}, {0.0, 1.0}), GridInvalid);
  CHECK_THROWS_AS(delta_surface(e, {0.0, 1.0}, {}), GridInvalid);
  CHECK_THROWS_AS(delta_surface(e, {1.0, 0.5}, {0.0, 1.0}), GridInvalid);      // descending
  CHECK_THROWS_AS(delta_surface(e, {0.0, 0.0, 1.0}, {0.0, 1.0}), GridInvalid); // repeated
  CHECK_THROWS_AS(delta_surface(e, {-1.0, 1.0}, {0.0, 1.0}), GridInvalid);     // negative
  CHECK_THROWS_AS(delta_surface(e, {0.0, std::nan("")}, {0.0, 1.0}), GridInvalid);
}

TEST_CASE("linspace spans the interval inclusively") {
  const auto g = linspace(0.0, 100.0, 512);
  REQUIRE(g.size() == 512);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 100.0);
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] > g[k - 1]);
  CHECK(linspace(5.0, 9.0, 1) == std::vector<double>{5.0});
  CHECK_THROWS_AS(linspace(0.0, 1.0, 0), GridInvalid);
  CHECK_THROWS_AS(linspace(1.0, 1.0, 2), GridInvalid);
}

TEST_CASE("surface CSV round-trips values at twelve significant digits") {
  const Environment e = table_env(2, 77.0, {0.9, -0.4});
  const CoherenceSurface s = delta_surface(e, linspace(0.0, 25.0, 4), linspace(0.0, 35.0, 5));
  const auto path = std::filesystem::temp_directory_path() /
                    ("nvpol-surface-" + std::to_string(::getpid()) + ".csv");
  write_surface_csv(s, path.string(), {"header line one", "two"});

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# header line one");
  std::getline(in, line);
  CHECK(line == "# two");
  std::getline(in, line);
  CHECK(line == "tau_us,t_us,re,im,abs");

  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string cell;
    std::vector<double> cols;
    while (std::getline(ss, cell, ',')) cols.push_back(std::stod(cell));
    REQUIRE(cols.size() == 5);
    const std::size_t i = rows / s.t_grid.size();
    const std::size_t j = rows % s.t_grid.size();
    CHECK(cols[0] == doctest::Approx(s.tau_grid[i]).epsilon(1e-11));
    CHECK(cols[1] == doctest::Approx(s.t_grid[j]).epsilon(1e-11));
    CHECK(cols[2] == doctest::Approx(s.at(i, j).real()).epsilon(1e-11));
    CHECK(cols[3] == doctest::Approx(s.at(i, j).imag()).epsilon(1e-11));
    CHECK(cols[4] == doctest::Approx(std::abs(s.at(i, j))).epsilon(1e-11));
    ++rows;
  }
  CHECK(rows == s.values.size());
  std::filesystem::remove(path);

  CHECK_THROWS_AS(write_surface_csv(s, "/nonexistent/dir/surface.csv", {}), IoError);
}
