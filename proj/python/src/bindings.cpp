#include "hyplateau/config.hpp"
#include "hyplateau/errors.hpp"
#include "hyplateau/hypgeom.hpp"
#include "hyplateau/serialize.hpp"
#include "hyplateau/solver.hpp"
#include "hyplateau/symfunc.hpp"
#include "hyplateau/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace hyplateau;
using nlohmann::json;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::dict& d) { return json::parse(py::module_::import("json").attr("dumps")(d).cast<std::string>()); }

symfunc::Kappa kappa_of(const Eigen::VectorXd& v) { return symfunc::Kappa(v); }

cli::RunConfig run_config(const std::string& command, const py::dict& options) {
    cli::RunConfig c;
    std::vector<std::string> problems;
    cli::apply_json(c, from_py(options), problems);
    if (!problems.empty()) throw ConfigError(std::move(problems));
    c.command = command;
    c.exports.clear();
    return cli::validate_config(std::move(c));
}

py::dict solution_dict(const solver::GraphSolution& sol) {
    py::dict d;
    d["statistics"] = to_py(io::statistics_json(sol.report));
    d["wall_time_s"] = sol.report.wall_time_s;
    d["sigma"] = sol.sigma;
    d["epsilon"] = sol.epsilon;
    std::vector<double> u(sol.u.begin(), sol.u.end());
    std::vector<std::vector<double>> x;
    for (std::size_t i = 0; i < sol.discretization->size(); ++i) {
        const auto& p = sol.discretization->position(i);
        x.emplace_back(p.data(), p.data() + p.size());
    }
    d["u"] = u;
    d["positions"] = x;
    d["gradient_estimate"] = to_py(io::to_json(verify::gradient_estimate_check(sol)));
    if (sol.discretization->kind() == solver::GridKind::Radial)
        d["nu_derivative_identity"] = to_py(io::to_json(hypgeom::check_lemma21_ii(sol)));
    return d;
}

}  // namespace

PYBIND11_MODULE(_hyplateau, m) {
    m.doc() = "constant-curvature graphs in hyperbolic space";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<AdmissibilityLost>(m, "AdmissibilityLost", PyExc_RuntimeError);
    py::register_exception<AdmissibilityError>(m, "AdmissibilityError", PyExc_ValueError);
    py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    py::class_<symfunc::CurvatureSpec>(m, "CurvatureSpec")
        .def_static("consecutive_quotient", &symfunc::CurvatureSpec::consecutive_quotient, py::arg("n"), py::arg("k"))
        .def_static("general_quotient", &symfunc::CurvatureSpec::general_quotient, py::arg("n"), py::arg("k"),
                    py::arg("l"))
        .def_static("kth_root", &symfunc::CurvatureSpec::kth_root, py::arg("n"), py::arg("k"),
                    py::arg("cone_index") = std::nullopt)
        .def_property_readonly("family", [](const symfunc::CurvatureSpec& s) { return symfunc::to_string(s.family()); })
        .def_property_readonly("n", &symfunc::CurvatureSpec::n)
        .def_property_readonly("k", &symfunc::CurvatureSpec::k)
        .def_property_readonly("l", &symfunc::CurvatureSpec::l)
        .def_property_readonly("cone_index", &symfunc::CurvatureSpec::cone_index)
        .def("__repr__", &symfunc::CurvatureSpec::describe);

    m.def("elementary_symmetric", [](const Eigen::VectorXd& v, int k) { return symfunc::elementary_symmetric(kappa_of(v), k); });
    m.def("normalized_Hk", [](const Eigen::VectorXd& v, int k) { return symfunc::normalized_Hk(kappa_of(v), k); });
    m.def("cone_contains", [](const Eigen::VectorXd& v, int k) { return symfunc::cone_contains(kappa_of(v), k); });
    m.def("eval_f", [](const symfunc::CurvatureSpec& s, const Eigen::VectorXd& v) { return symfunc::eval_f(s, kappa_of(v)); });
    m.def("grad_f", [](const symfunc::CurvatureSpec& s, const Eigen::VectorXd& v) { return symfunc::grad_f(s, kappa_of(v)); });
    m.def("hessian_f", [](const symfunc::CurvatureSpec& s, const Eigen::VectorXd& v) { return symfunc::hessian_f(s, kappa_of(v)); });
    m.def("check_conditions", [](const symfunc::CurvatureSpec& s, std::size_t samples, std::uint64_t seed) {
        return to_py(io::to_json(symfunc::check_conditions(s, samples, seed)));
    }, py::arg("spec"), py::arg("samples") = 10000, py::arg("seed") = 1);
    m.def("sup_gradient_sum", &symfunc::sup_gradient_sum, py::arg("spec"), py::arg("samples"), py::arg("seed"));
    m.def("sup_ratio_assumption", &symfunc::sup_ratio_assumption, py::arg("spec"), py::arg("samples"), py::arg("seed"));

    m.def("hyperbolic_curvatures", [](double u, const Eigen::VectorXd& Du, const Eigen::MatrixXd& D2u) {
        return hypgeom::hyperbolic_shape(u, Du, D2u).kappa;
    }, py::arg("u"), py::arg("Du"), py::arg("D2u"));
    m.def("make_cap", [](double R, double sigma, double h) { return to_py(io::to_json(hypgeom::make_cap(R, sigma, h))); },
          py::arg("R"), py::arg("sigma"), py::arg("boundary_height") = 0.0);

    m.def("solve", [](const py::dict& options) {
        const auto cfg = run_config("solve", options);
        return solution_dict(solver::continuation_solve(cli::make_solver_config(cfg)));
    }, py::arg("options"), "Solve with flat config keys (family, k, n, sigma, grid, ...).");
    m.def("check_estimates", [](const py::dict& options) {
        const auto cfg = run_config("check-estimates", options);
        const auto sol = solver::continuation_solve(cli::make_solver_config(cfg));
        py::dict d = solution_dict(sol);
        d["estimate"] = to_py(io::to_json(verify::estimate_constants(sol)));
        return d;
    }, py::arg("options"));
    m.def("eta", &verify::eta_of, py::arg("a"));
    m.def("kappa1_threshold", &verify::kappa1_threshold, py::arg("a"));
    m.def("algebraic_subinequalities", [](std::size_t samples, std::uint64_t seed) {
        return to_py(io::to_json(verify::algebraic_subinequalities(samples, seed)));
    }, py::arg("samples") = 100000, py::arg("seed") = 1);
}
