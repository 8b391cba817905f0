#include "nvpol/estimator.hpp"

#include <charconv>
#include <cmath>

namespace nvpol::est {

std::string method_name(Method m) {
  return m == Method::TimeIndependent ? "time-independent" : "time-dependent";
}

Method method_from_name(const std::string& name) {
  if (name == "time-independent") return Method::TimeIndependent;
  if (name == "time-dependent") return Method::TimeDependent;
  throw ConfigError("unknown method '" + name +
                    "' (expected time-independent or time-dependent)");
}

namespace {

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string describe_grids(const dyn::CoherenceSurface& s) {
  return "tau[" + format_double(s.tau_grid.front()) + "," + format_double(s.tau_grid.back()) +
         "]x" + std::to_string(s.tau_grid.size()) + " t[" + format_double(s.t_grid.front()) +
         "," + format_double(s.t_grid.back()) + "]x" + std::to_string(s.t_grid.size());
}

void require_nonempty(const dyn::CoherenceSurface& s) {
  if (s.tau_grid.empty() || s.t_grid.empty() || s.values.empty())
    throw EmptySurface("bound: empty surface");
}

}  // namespace

std::string BoundEstimate::to_json() const {
  std::string out = "{\"method\":\"" + method_name(method) + "\"";
  out += ",\"value\":" + format_double(value);
  out += ",\"argmax_tau_us\":" + format_double(argmax_tau);
  out += ",\"argmax_t_us\":" + format_double(argmax_t);
  out += ",\"n_spins\":" + std::to_string(n_spins);
  out += ",\"omega_rad_per_us\":" + format_double(omega);
  out += ",\"clamped_points\":" + std::to_string(clamped_points);
  out += ",\"grid_spec\":\"" + grid_spec + "\"}";
  return out;
}

BoundEstimate bound_time_independent(const dyn::CoherenceSurface& surface,
                                     std::size_t n_spins) {
  require_nonempty(surface);
  if (n_spins == 0) throw OutOfRange("bound_time_independent: n_spins must be >= 1");

  double best = -1.0;
  std::size_t best_i = 0, best_j = 0;
  for (std::size_t i = 0; i < surface.tau_grid.size(); ++i)
    for (std::size_t j = 0; j < surface.t_grid.size(); ++j) {
      const double v = std::abs(surface.at(i, j));
      if (v > best) {
        best = v;
        best_i = i;
        best_j = j;
      }
    }

  BoundEstimate b;
  b.method = Method::TimeIndependent;
  b.value = best / static_cast<double>(n_spins);
  b.argmax_tau = surface.tau_grid[best_i];
  b.argmax_t = surface.t_grid[best_j];
  b.n_spins = n_spins;
  b.grid_spec = describe_grids(surface);
  return b;
}

BoundEstimate bound_time_dependent(const dyn::CoherenceSurface& surface,
                                   std::size_t n_spins, double omega, double sin_floor) {
  require_nonempty(surface);
  if (n_spins == 0) throw OutOfRange("bound_time_dependent: n_spins must be >= 1");
  if (!(omega > 0.0)) throw NonPositiveOmega("bound_time_dependent: omega must be > 0");
  if (!(sin_floor > 0.0 && sin_floor < 1.0))
    throw OutOfRange("bound_time_dependent: sin_floor must be in (0, 1)");

  double best = -1.0;
  std::size_t best_i = 0, best_j = 0;
  std::size_t clamped = 0;
  bool any = false;
  for (std::size_t j = 0; j < surface.t_grid.size(); ++j) {
    const double s = std::abs(std::sin(0.5 * omega * surface.t_grid[j]));
    if (s < sin_floor) continue;
    any = true;
    for (std::size_t i = 0; i < surface.tau_grid.size(); ++i) {
      double ratio = std::abs(surface.at(i, j)) / (static_cast<double>(n_spins) * s);
      if (ratio > 1.0) {
        ratio = 1.0;
        ++clamped;
      }
      if (ratio > best) {
        best = ratio;
        best_i = i;
        best_j = j;
      }
    }
  }
  if (!any)
    throw AllPointsExcluded("bound_time_dependent: no grid point has |sin(omega t/2)| >= " +
                            format_double(sin_floor));

  BoundEstimate b;
  b.method = Method::TimeDependent;
  b.value = best;
  b.argmax_tau = surface.tau_grid[best_i];
  b.argmax_t = surface.t_grid[best_j];
  b.n_spins = n_spins;
  b.omega = omega;
  b.grid_spec = describe_grids(surface);
  b.clamped_points = clamped;
  return b;
}

std::vector<double> per_tau_curve(const dyn::CoherenceSurface& surface,
                                  std::size_t n_spins, Method method, double omega,
                                  double sin_floor) {
  require_nonempty(surface);
  if (n_spins == 0) throw OutOfRange("per_tau_curve: n_spins must be >= 1");
  if (method == Method::TimeDependent && !(omega > 0.0))
    throw NonPositiveOmega("per_tau_curve: omega must be > 0 for the time-dependent method");

  std::vector<double> curve(surface.tau_grid.size(), 0.0);
  for (std::size_t i = 0; i < surface.tau_grid.size(); ++i) {
    double best = 0.0;
    for (std::size_t j = 0; j < surface.t_grid.size(); ++j) {
      double v;
      if (method == Method::TimeIndependent) {
        v = std::abs(surface.at(i, j)) / static_cast<double>(n_spins);
      } else {
        const double s = std::abs(std::sin(0.5 * omega * surface.t_grid[j]));
        if (s < sin_floor) continue;
        v = std::min(1.0, std::abs(surface.at(i, j)) / (static_cast<double>(n_spins) * s));
      }
      if (v > best) best = v;
    }
    curve[i] = best;
  }
  return curve;
}

std::vector<PolarizationPoint> bound_vs_polarization(
    const env::Environment& base, const std::vector<double>& p_values, Method method,
    double b_z_gauss, const std::vector<double>& tau_grid,
    const std::vector<double>& t_grid, double sin_floor) {
  std::vector<PolarizationPoint> out;
  out.reserve(p_values.size());
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0))
      throw OutOfRange("bound_vs_polarization: p values must be in [0, 1]");
    env::Environment e = env::set_polarization(base, env::Uniform{p});
    e.b_z_gauss = b_z_gauss;
    const dyn::CoherenceSurface s = dyn::delta_surface(e, tau_grid, t_grid);
    const BoundEstimate b = method == Method::TimeIndependent
                                ? bound_time_independent(s, e.n())
                                : bound_time_dependent(s, e.n(), e.omega(), sin_floor);
    out.push_back(PolarizationPoint{e.mean_abs_polarization(), b.value});
  }
  return out;
}

SoundnessReport soundness_check(const env::Environment& e, Method method,
                                const std::vector<double>& tau_grid,
                                const std::vector<double>& t_grid, double sin_floor) {
  const dyn::CoherenceSurface s = dyn::delta_surface(e, tau_grid, t_grid);
  const BoundEstimate b = method == Method::TimeIndependent
                              ? bound_time_independent(s, e.n())
                              : bound_time_dependent(s, e.n(), e.omega(), sin_floor);
  SoundnessReport r;
  r.bound = b.value;
  r.p_bar = e.mean_abs_polarization();
  r.slack = r.p_bar - r.bound;
  if (r.bound > r.p_bar + 1e-9)
    throw SoundnessViolation("bound " + format_double(r.bound) + " exceeds true mean polarization " +
                             format_double(r.p_bar) + " (slack " + format_double(r.slack) + ")");
  return r;
}

}  // namespace nvpol::est
