#include "nvpol/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nvpol/rng.hpp"

namespace nvpol::env {

using json = nlohmann::ordered_json;

double CouplingRow::norm() const {
  return std::sqrt(ax * ax + ay * ay + az * az);
}

double Environment::mean_abs_polarization() const {
  if (spins.empty()) return 0.0;
  double s = 0.0;
  for (const auto& spin : spins) s += std::abs(spin.polarization);
  return s / static_cast<double>(spins.size());
}

Environment Environment::truncated(std::size_t n) const {
  if (n == 0 || n > spins.size())
    throw OutOfRange("truncated: n must be in [1, " + std::to_string(spins.size()) + "]");
  Environment out = *this;
  out.spins.resize(n);
  return out;
}

CouplingRow compute_coupling(const std::array<double, 3>& position_nm,
                             const PhysicalConstants& constants) {
  for (double c : position_nm)
    if (!std::isfinite(c)) throw NonFinite("compute_coupling: non-finite position component");
  const double r = std::sqrt(position_nm[0] * position_nm[0] +
                             position_nm[1] * position_nm[1] +
                             position_nm[2] * position_nm[2]);
  if (!(r > 0.15))
    throw DistanceTooSmall("compute_coupling: |position| = " + std::to_string(r) +
                           " nm is below the 0.15 nm bond-length cutoff");
  const double c = constants.dipolar_prefactor(r);
  const double nx = position_nm[0] / r;
  const double ny = position_nm[1] / r;
  const double nz = position_nm[2] / r;
  // A^{zj} = -C (delta_zj - 3 nhat_j nhat_z)
  return CouplingRow{3.0 * c * nx * nz, 3.0 * c * ny * nz, -c * (1.0 - 3.0 * nz * nz)};
}

namespace {

// Reference coupling table: {r_nm, ax, ay, az}, couplings in rad/us,
// ordered by ascending distance. Embedded verbatim as data -- the distances
// alone do not determine directions, so rows are never recomputed from
// geometry, only audited against the row-norm window.
constexpr std::array<std::array<double, 4>, 15> kReferenceTable = {{
    {0.50442, 1.37617, 0.0, 0.973096},
    {0.56396, 0.492352, -0.511667, -0.417774},
    {0.56396, 0.196941, 0.682223, -0.417774},
    {0.56396, -0.689293, 0.170556, -0.417774},
    {0.61778, 0.499393, 0.0, -0.353124},
    {0.63680, -0.013411, -0.116145, -0.47416},
    {0.66728, 0.0, 0.0, -0.420338},
    {0.68492, -0.372671, 0.161371, -0.22399},
    {1.03132, -0.251613, -0.251613, -0.215682},
    {1.03132, 0.505446, -0.135434, 0.257915},
    {1.54291, -0.137190, 0.036760, 0.122291},
    {2.16954, -0.017784, -0.007206, -0.034589},
    {2.33189, 0.013514, -0.003004, -0.028353},
    {2.35773, -0.041094, -0.011011, 0.027203},
    {2.45435, -0.001277, 0.004767, -0.025882},
}};

}  // namespace

Environment load_table1() {
  Environment e;
  e.spins.reserve(kReferenceTable.size());
  for (const auto& row : kReferenceTable) {
    NuclearSpin s;
    s.r_nm = row[0];
    s.coupling = CouplingRow{row[1], row[2], row[3]};
    s.polarization = 0.0;
    e.spins.push_back(s);
  }
  return e;
}

Environment generate_environment(std::uint64_t seed, std::size_t n_spins,
                                 double shell_min_nm, double shell_max_nm,
                                 const PhysicalConstants& constants) {
  if (n_spins < 1) throw OutOfRange("generate_environment: n_spins must be >= 1");
  if (!(shell_min_nm >= 0.15))
    throw OutOfRange("generate_environment: shell_min must be >= 0.15 nm");
  if (!(shell_max_nm > shell_min_nm))
    throw OutOfRange("generate_environment: shell_max must exceed shell_min");

  // Enumerate diamond-lattice sites around the qubit site at the origin:
  // FCC conventional cell plus the (1/4,1/4,1/4) two-atom basis.
  const double a = constants.lattice_constant;
  constexpr std::array<std::array<double, 3>, 4> fcc = {{
      {0.0, 0.0, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}}};
  const int span = static_cast<int>(std::ceil(shell_max_nm / a)) + 1;

  std::vector<std::array<double, 3>> sites;
  const double lo2 = shell_min_nm * shell_min_nm;
  const double hi2 = shell_max_nm * shell_max_nm;
  for (int i = -span; i <= span; ++i)
    for (int j = -span; j <= span; ++j)
      for (int k = -span; k <= span; ++k)
        for (const auto& f : fcc)
          for (int basis = 0; basis < 2; ++basis) {
            const double bshift = basis ? 0.25 : 0.0;
            const std::array<double, 3> pos = {(i + f[0] + bshift) * a,
                                               (j + f[1] + bshift) * a,
                                               (k + f[2] + bshift) * a};
            const double r2 = pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2];
            if (r2 >= lo2 && r2 <= hi2) sites.push_back(pos);
          }

  if (sites.size() < n_spins)
    throw ShellTooSmall("generate_environment: shell [" + std::to_string(shell_min_nm) +
                        ", " + std::to_string(shell_max_nm) + "] nm holds only " +
                        std::to_string(sites.size()) + " sites, need " +
                        std::to_string(n_spins));

  // Canonical site order (independent of enumeration order), then a partial
  // Fisher-Yates draw of n_spins distinct sites.
  std::sort(sites.begin(), sites.end(), [](const auto& p, const auto& q) {
    const double rp = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    const double rq = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
    if (rp != rq) return rp < rq;
    return p < q;
  });
  Rng rng(seed);
  for (std::size_t i = 0; i < n_spins; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(sites.size() - i));
    std::swap(sites[i], sites[j]);
  }
  sites.resize(n_spins);
  std::sort(sites.begin(), sites.end(), [](const auto& p, const auto& q) {
    const double rp = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    const double rq = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
    if (rp != rq) return rp < rq;
    return p < q;
  });

  Environment e;
  e.constants = constants;
  e.spins.reserve(n_spins);
  for (const auto& pos : sites) {
    NuclearSpin s;
    s.position = pos;
    s.r_nm = std::sqrt(pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]);
    s.coupling = compute_coupling(pos, constants);
    e.spins.push_back(s);
  }
  return e;
}

Environment set_polarization(const Environment& e, const Uniform& profile) {
  if (!(profile.p >= -1.0 && profile.p <= 1.0))
    throw OutOfRange("set_polarization: uniform p must be in [-1, 1]");
  Environment out = e;
  for (auto& s : out.spins) s.polarization = profile.p;
  return out;
}

Environment set_polarization(const Environment& e, const Explicit& profile) {
  if (profile.values.size() != e.spins.size())
    throw LengthMismatch("set_polarization: explicit list has " +
                         std::to_string(profile.values.size()) + " entries for " +
                         std::to_string(e.spins.size()) + " spins");
  for (double p : profile.values)
    if (!(p >= -1.0 && p <= 1.0))
      throw OutOfRange("set_polarization: explicit p must be in [-1, 1]");
  Environment out = e;
  for (std::size_t k = 0; k < out.spins.size(); ++k)
    out.spins[k].polarization = profile.values[k];
  return out;
}

Environment set_polarization(const Environment& e, const Graded& profile) {
  if (!(profile.mean >= 0.0 && profile.mean <= 1.0))
    throw OutOfRange("set_polarization: graded mean must be in [0, 1]");
  if (!(profile.sigma >= 0.0))
    throw OutOfRange("set_polarization: graded sigma must be >= 0");
  const std::size_t n = e.spins.size();

  // Draw magnitudes, clip into [0, 1].
  Rng rng(profile.seed);
  std::vector<double> p(n);
  for (auto& v : p) v = std::clamp(rng.normal(profile.mean, profile.sigma), 0.0, 1.0);

  // Restore the exact mean after clipping: shift the entries that still have
  // headroom, re-clip, repeat. Converges because every pass either lands on
  // the target or saturates at least one more entry.
  for (int pass = 0; pass < 64; ++pass) {
    const double mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(n);
    const double err = profile.mean - mean;
    if (std::abs(err) < 1e-15) break;
    std::size_t free_count = 0;
    for (double v : p)
      if ((err > 0.0 && v < 1.0) || (err < 0.0 && v > 0.0)) ++free_count;
    if (free_count == 0) break;
    const double shift = err * static_cast<double>(n) / static_cast<double>(free_count);
    for (auto& v : p)
      if ((err > 0.0 && v < 1.0) || (err < 0.0 && v > 0.0))
        v = std::clamp(v + shift, 0.0, 1.0);
  }

  // Strongest-coupled spins get the largest polarizations.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return e.spins[i].coupling.norm() > e.spins[j].coupling.norm();
  });
  std::sort(p.begin(), p.end(), std::greater<double>());

  Environment out = e;
  for (std::size_t rank = 0; rank < n; ++rank)
    out.spins[order[rank]].polarization = p[rank];
  return out;
}

std::vector<RowAudit> audit_row_norms(const Environment& e) {
  std::vector<RowAudit> audits;
  for (std::size_t k = 0; k < e.spins.size(); ++k) {
    const auto& s = e.spins[k];
    double r = 0.0;
    if (s.r_nm) {
      r = *s.r_nm;
    } else if (s.position) {
      const auto& p = *s.position;
      r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    } else {
      continue;  // no geometry to audit against
    }
    RowAudit a;
    a.index = k + 1;
    a.r_nm = r;
    a.row_norm = s.coupling.norm();
    a.lo = e.constants.dipolar_prefactor(r);
    a.hi = 2.0 * a.lo;
    a.pass = a.row_norm >= a.lo && a.row_norm <= a.hi;
    audits.push_back(a);
  }
  return audits;
}

std::string to_json(const Environment& e) {
  json doc;
  doc["b_z_gauss"] = e.b_z_gauss;
  doc["spins"] = json::array();
  for (const auto& s : e.spins) {
    json spin;
    if (s.r_nm) spin["r_nm"] = *s.r_nm;
    if (s.position) spin["position_nm"] = *s.position;
    spin["ax"] = s.coupling.ax;
    spin["ay"] = s.coupling.ay;
    spin["az"] = s.coupling.az;
    spin["p"] = s.polarization;
    doc["spins"].push_back(spin);
  }
  return doc.dump(2) + "\n";
}

Environment environment_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("environment parse error: ") + ex.what());
  }
  Environment e;
  try {
    e.b_z_gauss = doc.at("b_z_gauss").get<double>();
    for (const auto& spin : doc.at("spins")) {
      NuclearSpin s;
      if (spin.contains("r_nm")) s.r_nm = spin["r_nm"].get<double>();
      if (spin.contains("position_nm"))
        s.position = spin["position_nm"].get<std::array<double, 3>>();
      s.coupling = CouplingRow{spin.at("ax").get<double>(), spin.at("ay").get<double>(),
                               spin.at("az").get<double>()};
      s.polarization = spin.at("p").get<double>();
      if (!(s.polarization >= -1.0 && s.polarization <= 1.0))
        throw OutOfRange("environment: p outside [-1, 1]");
      if (s.position) {
        const CouplingRow expected = compute_coupling(*s.position, e.constants);
        const double scale = std::max(expected.norm(), 1e-30);
        const double dev = std::sqrt((expected.ax - s.coupling.ax) * (expected.ax - s.coupling.ax) +
                                     (expected.ay - s.coupling.ay) * (expected.ay - s.coupling.ay) +
                                     (expected.az - s.coupling.az) * (expected.az - s.coupling.az)) /
                           scale;
        if (dev > 1e-9)
          throw OutOfRange("environment: stored coupling deviates from its position by " +
                           std::to_string(dev) + " relative");
      }
      e.spins.push_back(s);
    }
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("environment schema error: ") + ex.what());
  }
  if (e.spins.empty()) throw ConfigError("environment: no spins");
  if (e.spins.size() > 24) throw TooLarge("environment: more than 24 spins");
  if (!(e.b_z_gauss >= 0.0)) throw OutOfRange("environment: b_z_gauss must be >= 0");
  return e;
}

void save_environment(const Environment& e, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << to_json(e);
  if (!out) throw IoError("write failed: " + path);
}

Environment load_environment(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return environment_from_json(ss.str());
}

}  // namespace nvpol::env
