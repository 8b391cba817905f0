// Python bindings for the conditional-dephasing simulator: environment
// construction, coherence-difference evaluation, the dense oracle and the
// polarization-bound estimators.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nvpol/config.hpp"
#include "nvpol/dynamics.hpp"
#include "nvpol/environment.hpp"
#include "nvpol/errors.hpp"
#include "nvpol/estimator.hpp"
#include "nvpol/oracle.hpp"
#include "nvpol/validate.hpp"
#include "nvpol/version.hpp"

namespace py = pybind11;
using namespace nvpol;

namespace {

py::array_t<std::complex<double>> surface_values(const dyn::CoherenceSurface& s) {
  const py::ssize_t rows = static_cast<py::ssize_t>(s.tau_grid.size());
  const py::ssize_t cols = static_cast<py::ssize_t>(s.t_grid.size());
  py::array_t<std::complex<double>> out({rows, cols});
  auto view = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < rows; ++i)
    for (py::ssize_t j = 0; j < cols; ++j)
      view(i, j) = s.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return out;
}

est::Method parse_method(const std::string& name) { return est::method_from_name(name); }

}  // namespace

PYBIND11_MODULE(_nvpol, m) {
  m.doc() = "Conditional-dephasing simulator and bath-polarization bound estimator";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "NvpolError");

  py::class_<PhysicalConstants>(m, "PhysicalConstants")
      .def(py::init<>())
      .def_readwrite("gamma_e", &PhysicalConstants::gamma_e)
      .def_readwrite("gamma_n", &PhysicalConstants::gamma_n)
      .def_readwrite("mu0_over_4pi", &PhysicalConstants::mu0_over_4pi)
      .def_readwrite("hbar", &PhysicalConstants::hbar)
      .def_readwrite("lattice_constant", &PhysicalConstants::lattice_constant)
      .def_readwrite("c13_abundance", &PhysicalConstants::c13_abundance)
      .def("dipolar_prefactor", &PhysicalConstants::dipolar_prefactor, py::arg("r_nm"))
      .def("larmor_per_us", &PhysicalConstants::larmor_per_us, py::arg("b_gauss"));

  py::class_<env::CouplingRow>(m, "CouplingRow")
      .def(py::init([](double ax, double ay, double az) {
             return env::CouplingRow{ax, ay, az};
           }),
           py::arg("ax") = 0.0, py::arg("ay") = 0.0, py::arg("az") = 0.0)
      .def_readwrite("ax", &env::CouplingRow::ax)
      .def_readwrite("ay", &env::CouplingRow::ay)
      .def_readwrite("az", &env::CouplingRow::az)
      .def("norm", &env::CouplingRow::norm)
      .def("__repr__", [](const env::CouplingRow& r) {
        std::ostringstream ss;
        ss << "CouplingRow(ax=" << r.ax << ", ay=" << r.ay << ", az=" << r.az << ")";
        return ss.str();
      });

  py::class_<env::NuclearSpin>(m, "NuclearSpin")
      .def(py::init<>())
      .def_readwrite("position", &env::NuclearSpin::position)
      .def_readwrite("r_nm", &env::NuclearSpin::r_nm)
      .def_readwrite("coupling", &env::NuclearSpin::coupling)
      .def_readwrite("polarization", &env::NuclearSpin::polarization);

  py::class_<env::Environment>(m, "Environment")
      .def(py::init<>())
      .def_readwrite("spins", &env::Environment::spins)
      .def_readwrite("b_z_gauss", &env::Environment::b_z_gauss)
      .def_readwrite("constants", &env::Environment::constants)
      .def("n", &env::Environment::n)
      .def("omega", &env::Environment::omega)
      .def("mean_abs_polarization", &env::Environment::mean_abs_polarization)
      .def("truncated", &env::Environment::truncated, py::arg("n"))
      .def("__len__", &env::Environment::n);

  m.def("compute_coupling", &env::compute_coupling, py::arg("position_nm"),
        py::arg("constants") = PhysicalConstants{},
        "Secular dipolar coupling row for a nucleus at the given position");
  m.def("load_table1", &env::load_table1, "The embedded 15-spin reference environment");
  m.def("generate_environment", &env::generate_environment, py::arg("seed"),
        py::arg("n_spins"), py::arg("shell_min_nm"), py::arg("shell_max_nm"),
        py::arg("constants") = PhysicalConstants{},
        "Sample diamond-lattice sites in a radial shell and compute couplings");

  m.def(
      "set_uniform_polarization",
      [](const env::Environment& e, double p) { return env::set_polarization(e, env::Uniform{p}); },
      py::arg("environment"), py::arg("p"));
  m.def(
      "set_graded_polarization",
      [](const env::Environment& e, double mean, double sigma, std::uint64_t seed) {
        return env::set_polarization(e, env::Graded{mean, sigma, seed});
      },
      py::arg("environment"), py::arg("mean"), py::arg("sigma"), py::arg("seed"),
      "Draw clipped-normal magnitudes, restore the exact mean, assign the largest "
      "values to the strongest-coupled spins");
  m.def(
      "set_explicit_polarization",
      [](const env::Environment& e, const std::vector<double>& values) {
        return env::set_polarization(e, env::Explicit{values});
      },
      py::arg("environment"), py::arg("values"));

  py::class_<env::RowAudit>(m, "RowAudit")
      .def_readonly("index", &env::RowAudit::index)
      .def_readonly("r_nm", &env::RowAudit::r_nm)
      .def_readonly("row_norm", &env::RowAudit::row_norm)
      .def_readonly("lo", &env::RowAudit::lo)
      .def_readonly("hi", &env::RowAudit::hi)
      .def_readonly("passed", &env::RowAudit::pass);
  m.def("audit_row_norms", &env::audit_row_norms, py::arg("environment"),
        "Check each row norm against the dipolar window [C(r), 2C(r)]");

  m.def("environment_to_json", &env::to_json, py::arg("environment"));
  m.def("environment_from_json", &env::environment_from_json, py::arg("text"));
  m.def("save_environment", &env::save_environment, py::arg("environment"), py::arg("path"));
  m.def("load_environment", &env::load_environment, py::arg("path"));

  m.def("l0", &dyn::l0, py::arg("row"), py::arg("p"), py::arg("omega"), py::arg("t"),
        "Per-spin coherence factor of the decoupled preparation branch");
  m.def("c_k", &dyn::c_k, py::arg("row"), py::arg("omega"), py::arg("tau"), py::arg("t"),
        "Conditional-evolution overlap factor");
  m.def("l1", &dyn::l1, py::arg("row"), py::arg("p"), py::arg("omega"), py::arg("tau"),
        py::arg("t"), "Per-spin coherence factor of the coupled preparation branch");
  m.def("coherence_branch", &dyn::coherence_branch, py::arg("environment"), py::arg("branch"),
        py::arg("tau"), py::arg("t"));
  m.def("delta_rho", &dyn::delta_rho, py::arg("environment"), py::arg("tau"), py::arg("t"),
        "Coherence difference between the two preparation branches");
  m.def("delta_rho_product", &dyn::delta_rho_product, py::arg("environment"), py::arg("tau"),
        py::arg("t"));

  py::class_<dyn::CoherenceSurface>(m, "CoherenceSurface")
      .def_readonly("tau_grid", &dyn::CoherenceSurface::tau_grid)
      .def_readonly("t_grid", &dyn::CoherenceSurface::t_grid)
      .def_property_readonly("values", &surface_values,
                             "Complex surface samples, shape (len(tau_grid), len(t_grid))");
  m.def("delta_surface", &dyn::delta_surface, py::arg("environment"), py::arg("tau_grid"),
        py::arg("t_grid"));
  m.def("linspace", &dyn::linspace, py::arg("min"), py::arg("max"), py::arg("points"));

  m.def("oracle_delta", &oracle::oracle_delta, py::arg("environment"), py::arg("tau"),
        py::arg("t"), "Dense-propagator coherence difference (N <= 12)");
  m.def("prepared_coherence", &oracle::prepared_coherence, py::arg("environment"),
        py::arg("branch"), py::arg("tau"), py::arg("t"));

  py::class_<est::BoundEstimate>(m, "BoundEstimate")
      .def_property_readonly("method",
                             [](const est::BoundEstimate& b) { return est::method_name(b.method); })
      .def_readonly("value", &est::BoundEstimate::value)
      .def_readonly("argmax_tau", &est::BoundEstimate::argmax_tau)
      .def_readonly("argmax_t", &est::BoundEstimate::argmax_t)
      .def_readonly("n_spins", &est::BoundEstimate::n_spins)
      .def_readonly("omega", &est::BoundEstimate::omega)
      .def_readonly("grid_spec", &est::BoundEstimate::grid_spec)
      .def_readonly("clamped_points", &est::BoundEstimate::clamped_points)
      .def("to_json", &est::BoundEstimate::to_json);

  m.def("bound_time_independent", &est::bound_time_independent, py::arg("surface"),
        py::arg("n_spins"), "max |surface| / N");
  m.def("bound_time_dependent", &est::bound_time_dependent, py::arg("surface"),
        py::arg("n_spins"), py::arg("omega"), py::arg("sin_floor") = 0.05,
        "max |surface| / (N |sin(omega t/2)|) over points above the floor, clamped to 1");
  m.def(
      "per_tau_curve",
      [](const dyn::CoherenceSurface& s, std::size_t n, const std::string& method, double omega,
         double sin_floor) { return est::per_tau_curve(s, n, parse_method(method), omega, sin_floor); },
      py::arg("surface"), py::arg("n_spins"), py::arg("method"), py::arg("omega"),
      py::arg("sin_floor") = 0.05);

  py::class_<est::PolarizationPoint>(m, "PolarizationPoint")
      .def_readonly("p_actual", &est::PolarizationPoint::p_actual)
      .def_readonly("bound", &est::PolarizationPoint::bound);
  m.def(
      "bound_vs_polarization",
      [](const env::Environment& base, const std::vector<double>& p_values,
         const std::string& method, double b_z_gauss, const std::vector<double>& tau_grid,
         const std::vector<double>& t_grid, double sin_floor) {
        return est::bound_vs_polarization(base, p_values, parse_method(method), b_z_gauss,
                                          tau_grid, t_grid, sin_floor);
      },
      py::arg("base"), py::arg("p_values"), py::arg("method"), py::arg("b_z_gauss"),
      py::arg("tau_grid"), py::arg("t_grid"), py::arg("sin_floor") = 0.05);

  py::class_<est::SoundnessReport>(m, "SoundnessReport")
      .def_readonly("bound", &est::SoundnessReport::bound)
      .def_readonly("p_bar", &est::SoundnessReport::p_bar)
      .def_readonly("slack", &est::SoundnessReport::slack);
  m.def(
      "soundness_check",
      [](const env::Environment& e, const std::string& method,
         const std::vector<double>& tau_grid, const std::vector<double>& t_grid,
         double sin_floor) {
        return est::soundness_check(e, parse_method(method), tau_grid, t_grid, sin_floor);
      },
      py::arg("environment"), py::arg("method"), py::arg("tau_grid"), py::arg("t_grid"),
      py::arg("sin_floor") = 0.05,
      "Evaluate the bound and verify it does not exceed the true mean polarization");

  m.def(
      "run_validation",
      [](std::size_t max_n, std::size_t cases, std::uint64_t seed, bool corrupt) {
        std::ostringstream report;
        const bool ok = validate::run_validation(max_n, cases, seed, corrupt, report);
        return py::make_tuple(ok, report.str());
      },
      py::arg("max_n") = 6, py::arg("cases") = 200, py::arg("seed") = 42,
      py::arg("corrupt") = false,
      "Randomized cross-validation battery; returns (passed, report_text)");
}
