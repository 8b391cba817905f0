#include "nvpol/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace nvpol::dyn {

SpinFrequencies::SpinFrequencies(const env::CouplingRow& row, double omega_in) {
  omega = omega_in;
  perp_sq = row.ax * row.ax + row.ay * row.ay;
  const double wz = omega_in + row.az;
  omega_k = std::sqrt(perp_sq + wz * wz);
}

Complex l0(const env::CouplingRow& row, double p, double omega, double t) {
  const SpinFrequencies f(row, omega);
  const double ch = std::cos(0.5 * omega * t);
  const double sh = std::sin(0.5 * omega * t);
  // (omega+az)/omega_k * sin(omega_k t/2): goes to 0 with omega_k -> 0
  // (omega_k = 0 forces omega+az = 0), which also collapses cos(omega_k t/2)
  // to 1 -- the closed form degrades continuously to cos - i p sin.
  double axial = 0.0;
  double ck = 1.0;
  if (f.omega_k > 0.0) {
    axial = (omega + row.az) / f.omega_k * std::sin(0.5 * f.omega_k * t);
    ck = std::cos(0.5 * f.omega_k * t);
  }
  const double re = axial * sh + ch * ck;
  const double im = p * (axial * ch - sh * ck);
  return {re, im};
}

double c_k(const env::CouplingRow& row, double omega, double tau, double t) {
  const SpinFrequencies f(row, omega);
  if (f.perp_sq == 0.0 || f.omega_k == 0.0) return 0.0;
  return -2.0 * (f.perp_sq / (f.omega_k * f.omega_k)) * std::sin(0.5 * f.omega_k * tau) *
         std::sin(0.5 * omega * t) * std::sin(0.5 * f.omega_k * (tau + t));
}

Complex l1(const env::CouplingRow& row, double p, double omega, double tau, double t) {
  return l0(row, p, omega, t) - Complex(0.0, 1.0) * (p * c_k(row, omega, tau, t));
}

Complex coherence_branch(const env::Environment& e, int branch, double tau, double t) {
  if (e.spins.empty()) throw OutOfRange("coherence_branch: empty environment");
  if (branch != 0 && branch != 1) throw OutOfRange("coherence_branch: branch must be 0 or 1");
  const double omega = e.omega();
  Complex prod(1.0, 0.0);
  for (const auto& s : e.spins)
    prod *= branch == 0 ? l0(s.coupling, s.polarization, omega, t)
                        : l1(s.coupling, s.polarization, omega, tau, t);
  return 0.5 * prod;
}

Complex delta_rho(const env::Environment& e, double tau, double t) {
  if (e.spins.empty()) throw OutOfRange("delta_rho: empty environment");
  const double omega = e.omega();
  const std::size_t n = e.spins.size();

  // prefix0[m] = prod_{k<m} L_k^(0), suffix1[m] = prod_{k>m} L_k^(1)
  std::vector<Complex> suffix1(n + 1);
  suffix1[n] = Complex(1.0, 0.0);
  for (std::size_t m = n; m-- > 0;)
    suffix1[m] = l1(e.spins[m].coupling, e.spins[m].polarization, omega, tau, t) * suffix1[m + 1];

  Complex sum(0.0, 0.0);
  Complex prefix0(1.0, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    const auto& s = e.spins[m];
    const double cm = c_k(s.coupling, omega, tau, t);
    sum += Complex(0.0, s.polarization * cm) * prefix0 * suffix1[m + 1];
    prefix0 *= l0(s.coupling, s.polarization, omega, t);
  }
  return 0.5 * sum;
}

Complex delta_rho_product(const env::Environment& e, double tau, double t) {
  return coherence_branch(e, 0, tau, t) - coherence_branch(e, 1, tau, t);
}

namespace {

void check_grid(const std::vector<double>& g, const char* name) {
  if (g.empty()) throw GridInvalid(std::string(name) + " grid is empty");
  double prev = -1.0;
  for (double v : g) {
    if (!std::isfinite(v) || v < 0.0)
      throw GridInvalid(std::string(name) + " grid values must be finite and >= 0");
    if (v <= prev) throw GridInvalid(std::string(name) + " grid must be strictly ascending");
    prev = v;
  }
}

unsigned worker_count(std::size_t rows) {
  unsigned n = 0;
  if (const char* env_threads = std::getenv("NVPOL_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env_threads, &end, 10);
    if (end != env_threads && parsed >= 0) n = static_cast<unsigned>(parsed);
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, rows));
}

}  // namespace

CoherenceSurface delta_surface(const env::Environment& e,
                               const std::vector<double>& tau_grid,
                               const std::vector<double>& t_grid) {
  check_grid(tau_grid, "tau");
  check_grid(t_grid, "t");

  CoherenceSurface s;
  s.tau_grid = tau_grid;
  s.t_grid = t_grid;
  s.values.resize(tau_grid.size() * t_grid.size());

  const unsigned workers = worker_count(tau_grid.size());
  auto eval_rows = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < tau_grid.size(); i += step)
      for (std::size_t j = 0; j < t_grid.size(); ++j)
        s.values[i * t_grid.size() + j] = delta_rho(e, tau_grid[i], t_grid[j]);
  };

  if (workers <= 1) {
    eval_rows(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(eval_rows, w, workers);
    for (auto& th : pool) th.join();
  }
  return s;
}

std::vector<double> linspace(double min, double max, std::size_t points) {
  if (points == 0) throw GridInvalid("linspace: zero points");
  if (points == 1) return {min};
  if (!(max > min)) throw GridInvalid("linspace: max must exceed min");
  std::vector<double> g(points);
  const double step = (max - min) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = min + step * static_cast<double>(i);
  g.back() = max;
  return g;
}

namespace {

// 12-significant-digit decimal, locale-independent.
std::string format12(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_surface_csv(const CoherenceSurface& s, const std::string& path,
                       const std::vector<std::string>& header_comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& line : header_comments) out << "# " << line << "\n";
  out << "tau_us,t_us,re,im,abs\n";
  for (std::size_t i = 0; i < s.tau_grid.size(); ++i)
    for (std::size_t j = 0; j < s.t_grid.size(); ++j) {
      const Complex& v = s.at(i, j);
      out << format12(s.tau_grid[i]) << ',' << format12(s.t_grid[j]) << ','
          << format12(v.real()) << ',' << format12(v.imag()) << ',' << format12(std::abs(v))
          << '\n';
    }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace nvpol::dyn
