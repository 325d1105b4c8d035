#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <tuple>
#include <vector>

#include "bergman/disc_kernel.hpp"
#include "bergman/errors.hpp"
#include "bergman/experiment.hpp"
#include "bergman/model_kernel.hpp"
#include "bergman/sections.hpp"
#include "bergman/statistics.hpp"

namespace py = pybind11;
using namespace bergman;

namespace {

using SpacePtr = std::shared_ptr<DiscSpace>;

HomogeneousCurvature curvature(int rho_prime, const std::vector<std::tuple<int, int, double>>& terms, bool form) {
  std::vector<XYMonomial> t;
  for (const auto& [i, j, c] : terms) t.push_back({i, j, c});
  return form ? HomogeneousCurvature::from_form_coefficient(rho_prime, t) : HomogeneousCurvature::from_terms(rho_prime, t);
}

py::list rows_to_python(const StatsReport& rep) {
  py::list out;
  for (const StatsRow& r : rep.rows) {
    py::dict d;
    d["experiment"] = r.experiment;
    d["p"] = r.p;
    d["statistic"] = r.statistic;
    d["estimate"] = r.estimate;
    d["stderr"] = r.stderr_;
    d["prediction"] = r.prediction;
    d["deviation"] = r.deviation;
    d["n_samples"] = r.n_samples;
    d["seed"] = r.seed;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bergman kernels of the punctured disc and zeros of random holomorphic sections.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidParameter>(m, "InvalidParameter", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<TruncationError>(m, "TruncationError", base.ptr());
  py::register_exception<QuadratureError>(m, "QuadratureError", base.ptr());
  py::register_exception<NumericalFailure>(m, "NumericalFailure", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<Annulus>(m, "Annulus")
      .def(py::init<double, double>(), py::arg("inner"), py::arg("outer"))
      .def_property_readonly("inner", &Annulus::inner)
      .def_property_readonly("outer", &Annulus::outer)
      .def_property_readonly("empty", &Annulus::empty);

  py::class_<DiscSpace, SpacePtr>(m, "DiscSpace")
      .def(py::init<int, std::size_t>(), py::arg("p"), py::arg("length"))
      .def_static("for_radius", [](int p, double r, double tol) { return std::make_shared<DiscSpace>(DiscSpace::for_radius(p, r, tol)); },
                  py::arg("p"), py::arg("max_radius"), py::arg("rel_tol") = 1e-14)
      .def_property_readonly("p", &DiscSpace::p)
      .def_property_readonly("length", &DiscSpace::length)
      .def("log_coeff", &DiscSpace::log_coeff, py::arg("ell"));

  m.def("log_coefficient", &log_coefficient, py::arg("p"), py::arg("ell"));
  m.def("kernel_function", &kernel_function, py::arg("space"), py::arg("r"));
  m.def("plateau_deviation", &plateau_deviation, py::arg("p"), py::arg("r"));
  m.def("sup_kernel", [](const DiscSpace& s) {
    const SupResult r = sup_kernel(s);
    return py::dict(py::arg("value") = r.value, py::arg("r_star") = r.r_star, py::arg("log_r_star") = r.log_r_star);
  }, py::arg("space"));
  m.def("normalized_kernel", [](const DiscSpace& s, complex z, complex w) { return normalized_kernel(s, z, w).value; },
        py::arg("space"), py::arg("z"), py::arg("w"));
  m.def("poincare_distance", &poincare_distance, py::arg("z"), py::arg("w"));
  m.def("area_L", &area_L, py::arg("region"));
  m.def("expected_zero_measure", [](const DiscSpace& s, const Annulus& a) { return expected_zero_measure(s, a).value; },
        py::arg("space"), py::arg("region"));

  m.def("truncation_length", &truncation_length, py::arg("p"), py::arg("outer_radius"), py::arg("eps"));
  m.def("sample_coefficients", [](SpacePtr s, std::uint64_t seed, std::vector<std::uint64_t> path) {
    return sample_section(std::move(s), seed, std::move(path)).eta;
  }, py::arg("space"), py::arg("seed"), py::arg("path"));
  m.def("find_zeros", [](SpacePtr s, std::vector<complex> eta, const Annulus& a) {
    std::vector<complex> out;
    for (const Zero& z : find_zeros(section_from_coefficients(std::move(s), std::move(eta)), a).zeros)
      for (int k = 0; k < z.multiplicity; ++k) out.push_back(z.location);
    return out;
  }, py::arg("space"), py::arg("eta"), py::arg("region"));
  m.def("count_zeros_argument_principle", [](SpacePtr s, std::vector<complex> eta, const Annulus& a) {
    return count_zeros_argument_principle(section_from_coefficients(std::move(s), std::move(eta)), a).count;
  }, py::arg("space"), py::arg("eta"), py::arg("region"));

  m.def("model_kernel_at_zero", [](int rho_prime, const std::vector<std::tuple<int, int, double>>& terms,
                                   const std::string& convention, double rel_tol) {
    if (convention != "psi" && convention != "form") throw InvalidParameter("convention must be 'psi' or 'form'");
    const PotentialPair pp = solve_potential(curvature(rho_prime, terms, convention == "form"));
    return model_bergman_at_zero_converged(pp.with_gauge(integrable_gauge(pp)), rel_tol).value;
  }, py::arg("rho_prime"), py::arg("terms"), py::arg("convention") = "psi", py::arg("rel_tol") = 1e-6);
  m.def("constant_curvature_kernel_at_zero", [](double c) {
    return model_bergman_at_zero(gram_matrix(solve_potential(HomogeneousCurvature::constant(c)), 12));
  }, py::arg("c"));

  m.def("variance_bipotential", [](const DiscSpace& s, double a, double b, double height) {
    return variance_bipotential(s, TestFunction::bump(a, b, height)).value;
  }, py::arg("space"), py::arg("a"), py::arg("b"), py::arg("height") = 1.0);
  m.def("variance_leading_term", [](int p, double a, double b, double height) {
    return variance_leading_term(TestFunction::bump(a, b, height), p);
  }, py::arg("p"), py::arg("a"), py::arg("b"), py::arg("height") = 1.0);

  m.def("list_experiments", [] {
    py::list out;
    for (const ExperimentInfo& i : list_experiments()) out.append(i.kind);
    return out;
  });
  m.def("run_experiment", [](const std::string& config_text) {
    const ExperimentConfig config = parse_config(config_text);
    StatsReport rep;
    {
      py::gil_scoped_release release;
      rep = run_experiment(config);
    }
    py::dict checks;
    for (const CheckResult& c : rep.checks) checks[py::str(c.name)] = c.passed;
    return py::make_tuple(rows_to_python(rep), checks);
  }, py::arg("config_json"));
}
