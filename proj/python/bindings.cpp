#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "anisogauge/acceptance.hpp"
#include "anisogauge/fundsol.hpp"
#include "anisogauge/operators.hpp"
#include "anisogauge/quadrature.hpp"
#include "anisogauge/serialize.hpp"
#include "anisogauge/version.hpp"

namespace py = pybind11;
using namespace anisogauge;

namespace {

QuadratureConfig make_config(const std::string& method, std::int64_t budget, double rel_err,
                             std::uint64_t seed, int strata_depth) {
    QuadratureConfig cfg;
    cfg.method = QuadratureConfig::parse_method(method);
    cfg.budget = budget;
    cfg.target_rel_error = rel_err;
    cfg.seed = seed;
    cfg.stratification_depth = strata_depth;
    cfg.validate();
    return cfg;
}

ScalarField field_from_callables(std::function<double(const Vector&)> value,
                                 std::function<Vector(const Vector&)> gradient) {
    ScalarField f;
    f.value = std::move(value);
    f.gradient = std::move(gradient);
    return f;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Anisotropic Minkowski gauges, their Legendre transforms, degenerate "
              "quasilinear operators, and explicit fundamental solutions";
    m.attr("__version__") = kVersion;

    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<DegeneratePointError>(m, "DegeneratePointError", PyExc_ValueError);
    py::register_exception<InconsistencyError>(m, "InconsistencyError", PyExc_RuntimeError);

    // ---------------------------------------------------------------- norms
    py::class_<MinkowskiNorm>(m, "MinkowskiNorm")
        .def_static("euclidean", &MinkowskiNorm::euclidean, py::arg("dim"))
        .def_static("power", &MinkowskiNorm::power, py::arg("dim"), py::arg("q"))
        .def_static("quadratic", &MinkowskiNorm::quadratic, py::arg("matrix"))
        .def_static("custom", &MinkowskiNorm::custom, py::arg("dim"), py::arg("value"),
                    py::arg("gradient"), py::arg("dual_value") = nullptr,
                    py::arg("dual_gradient") = nullptr)
        .def_static("from_json",
                    [](const std::string& text) { return norm_from_json(json::parse(text)); })
        .def("to_json", [](const MinkowskiNorm& n) { return norm_to_json(n).dump(); })
        .def_property_readonly("dim", &MinkowskiNorm::dim)
        .def_property_readonly("family", &MinkowskiNorm::family_name)
        .def("value", [](const MinkowskiNorm& n, const Vector& x) { return n.value(x); },
             py::arg("x"))
        .def("gradient", [](const MinkowskiNorm& n, const Vector& x) { return n.gradient(x); },
             py::arg("x"))
        .def("has_closed_form_dual", &MinkowskiNorm::has_closed_form_dual)
        .def("dual", &MinkowskiNorm::dual)
        .def("equivalence_bounds", &MinkowskiNorm::equivalence_bounds)
        .def("__call__", [](const MinkowskiNorm& n, const Vector& x) { return n.value(x); })
        .def("__repr__", [](const MinkowskiNorm& n) {
            return "<MinkowskiNorm " + n.family_name() + " dim=" + std::to_string(n.dim()) + ">";
        });

    py::class_<DualResolution>(m, "DualResolution")
        .def(py::init([](const std::string& mode, int multistarts, double tolerance,
                         int max_iterations, std::uint64_t seed) {
                 DualResolution res;
                 if (mode == "closed-form") res.mode = DualResolution::Mode::ClosedForm;
                 else if (mode == "variational") res.mode = DualResolution::Mode::Variational;
                 else throw std::invalid_argument("mode must be closed-form or variational");
                 res.multistarts = multistarts;
                 res.tolerance = tolerance;
                 res.max_iterations = max_iterations;
                 res.seed = seed;
                 res.validate();
                 return res;
             }),
             py::arg("mode") = "closed-form", py::arg("multistarts") = 8,
             py::arg("tolerance") = 1e-10, py::arg("max_iterations") = 200,
             py::arg("seed") = 0x9e3779b97f4a7c15ull);

    m.def("dual_value", &dual_value, py::arg("norm"), py::arg("x"),
          py::arg("resolution") = DualResolution{}, py::call_guard<py::gil_scoped_release>());

    py::class_<DualityReport>(m, "DualityReport")
        .def_readonly("gradient_on_sphere_primal", &DualityReport::gradient_on_sphere_primal)
        .def_readonly("gradient_on_sphere_dual", &DualityReport::gradient_on_sphere_dual)
        .def_readonly("gradient_inversion_primal", &DualityReport::gradient_inversion_primal)
        .def_readonly("gradient_inversion_dual", &DualityReport::gradient_inversion_dual)
        .def_readonly("cauchy_schwarz_violation", &DualityReport::cauchy_schwarz_violation)
        .def_readonly("double_dual", &DualityReport::double_dual)
        .def_readonly("euler", &DualityReport::euler)
        .def_readonly("samples", &DualityReport::samples)
        .def("worst_identity_residual", &DualityReport::worst_identity_residual);

    m.def("verify_duality_suite", &verify_duality_suite, py::arg("norm"), py::arg("sample_count"),
          py::arg("seed"),
          py::arg("double_dual_resolution") =
              DualResolution{DualResolution::Mode::Variational, 8, 1e-8, 400},
          py::call_guard<py::gil_scoped_release>());

    // ---------------------------------------------------------------- fields
    py::class_<ScalarField>(m, "ScalarField")
        .def(py::init(&field_from_callables), py::arg("value"), py::arg("gradient") = nullptr)
        .def("value", [](const ScalarField& f, const Vector& x) { return f.value(x); })
        .def_property_readonly("name", [](const ScalarField& f) { return f.name; });

    py::class_<RadialProfile>(m, "RadialProfile")
        .def_property_readonly("name", [](const RadialProfile& p) { return p.name; })
        .def("f", [](const RadialProfile& p, double t) { return p.f(t); })
        .def("df", [](const RadialProfile& p, double t) { return p.df(t); })
        .def("ddf", [](const RadialProfile& p, double t) { return p.ddf(t); });

    m.def("make_profile", &make_profile, py::arg("name"), py::arg("gamma") = 1.0);
    m.def("combine_profiles", &combine_profiles, py::arg("a"), py::arg("f1"), py::arg("b"),
          py::arg("f2"));

    m.def("finsler_laplacian", &finsler_laplacian, py::arg("norm"), py::arg("field"), py::arg("x"),
          py::arg("h") = 0.0);

    // ---------------------------------------------------------------- gauge
    py::class_<Point>(m, "Point")
        .def(py::init<Vector, Vector>(), py::arg("z"), py::arg("sigma"))
        .def_static("from_flat", &Point::from_flat, py::arg("x"), py::arg("split"))
        .def_readwrite("z", &Point::z)
        .def_readwrite("sigma", &Point::sigma)
        .def("flat", &Point::flat)
        .def("__repr__", [](const Point& p) {
            return "<Point m=" + std::to_string(p.m()) + " k=" + std::to_string(p.k()) + ">";
        });

    py::class_<ProductGauge>(m, "ProductGauge")
        .def(py::init<MinkowskiNorm, MinkowskiNorm, double>(), py::arg("phi"), py::arg("psi"),
             py::arg("alpha"))
        .def_static("from_json",
                    [](const std::string& text) { return gauge_from_json(json::parse(text)); })
        .def("to_json", [](const ProductGauge& g) { return gauge_to_json(g).dump(); })
        .def_property_readonly("phi", &ProductGauge::phi)
        .def_property_readonly("psi", &ProductGauge::psi)
        .def_property_readonly("alpha", &ProductGauge::alpha)
        .def_property_readonly("m", &ProductGauge::m)
        .def_property_readonly("k", &ProductGauge::k)
        .def_property_readonly("homogeneous_dimension", &ProductGauge::homogeneous_dimension)
        .def("theta", &ProductGauge::theta, py::arg("x"))
        .def("theta0", &ProductGauge::theta0, py::arg("x"))
        .def("dilate", &ProductGauge::dilate, py::arg("t"), py::arg("x"))
        .def("rho_gradient", &ProductGauge::rho_gradient, py::arg("x"))
        .def("eikonal_residual", &ProductGauge::eikonal_residual, py::arg("x"))
        .def("split", &ProductGauge::split, py::arg("flat"));

    py::class_<VariationalConfig>(m, "VariationalConfig")
        .def(py::init([](int multistarts, double tolerance, int max_iterations,
                         std::uint64_t seed) {
                 VariationalConfig cfg{multistarts, tolerance, max_iterations, seed};
                 cfg.validate();
                 return cfg;
             }),
             py::arg("multistarts") = 16, py::arg("tolerance") = 1e-12,
             py::arg("max_iterations") = 600, py::arg("seed") = 0x51e9d1u);

    m.def("theta0_variational", &theta0_variational, py::arg("gauge"), py::arg("x"),
          py::arg("config") = VariationalConfig{}, py::call_guard<py::gil_scoped_release>());

    // ------------------------------------------------------------- operators
    py::class_<OperatorParams>(m, "OperatorParams")
        .def(py::init([](double alpha, double p) {
                 OperatorParams params{alpha, p};
                 params.validate();
                 return params;
             }),
             py::arg("alpha"), py::arg("p"))
        .def_readonly("alpha", &OperatorParams::alpha)
        .def_readonly("p", &OperatorParams::p);

    m.def("energy_density", &energy_density, py::arg("gauge"), py::arg("field"), py::arg("x"));
    m.def("flux", &flux, py::arg("gauge"), py::arg("params"), py::arg("field"), py::arg("x"));
    m.def("apply_Lp", &apply_Lp, py::arg("gauge"), py::arg("params"), py::arg("field"),
          py::arg("x"), py::arg("h") = 0.0);
    m.def("make_radial_field", &make_radial_field, py::arg("gauge"), py::arg("profile"),
          py::arg("sigma_offset") = Vector());
    m.def("radial_rhs", &radial_rhs, py::arg("gauge"), py::arg("params"), py::arg("profile"),
          py::arg("x"));

    py::class_<RadialConsistencyReport>(m, "RadialConsistencyReport")
        .def_readonly("max_rel_deviation", &RadialConsistencyReport::max_rel_deviation)
        .def_readonly("linearity_residual", &RadialConsistencyReport::linearity_residual)
        .def_readonly("convergence_ratio", &RadialConsistencyReport::convergence_ratio)
        .def_readonly("samples", &RadialConsistencyReport::samples);

    m.def("radial_consistency_report", &radial_consistency_report, py::arg("gauge"),
          py::arg("params"), py::arg("profile"), py::arg("samples"), py::arg("seed"),
          py::arg("h") = 0.0, py::call_guard<py::gil_scoped_release>());

    // ------------------------------------------------------------ quadrature
    py::class_<QuadratureConfig>(m, "QuadratureConfig")
        .def(py::init(&make_config), py::arg("method") = "monte-carlo",
             py::arg("budget") = 1'000'000, py::arg("rel_err") = 1e-3, py::arg("seed") = 1,
             py::arg("strata_depth") = 5)
        .def_property_readonly("method", &QuadratureConfig::method_name)
        .def_readonly("budget", &QuadratureConfig::budget)
        .def_readonly("seed", &QuadratureConfig::seed);

    py::class_<Region>(m, "Region")
        .def_static("gauge_ball", &Region::gauge_ball, py::arg("r"))
        .def_static("gauge_shell", &Region::gauge_shell, py::arg("r0"), py::arg("r1"))
        .def_static("box_minus_ball", &Region::box_minus_ball, py::arg("lo"), py::arg("hi"),
                    py::arg("excision"));

    py::class_<IntegralEstimate>(m, "IntegralEstimate")
        .def_readonly("value", &IntegralEstimate::value)
        .def_readonly("error", &IntegralEstimate::error)
        .def_readonly("evaluations", &IntegralEstimate::evaluations)
        .def_readonly("budget_exhausted", &IntegralEstimate::budget_exhausted)
        .def_readonly("acceptance_rate", &IntegralEstimate::acceptance_rate)
        .def_readonly("method", &IntegralEstimate::method);

    m.def("integrate", &integrate, py::arg("f"), py::arg("region"), py::arg("gauge"),
          py::arg("config"), py::call_guard<py::gil_scoped_release>());

    py::class_<ShellEstimate>(m, "ShellEstimate")
        .def_readonly("value", &ShellEstimate::value)
        .def_readonly("error", &ShellEstimate::error)
        .def_readonly("deltas", &ShellEstimate::deltas)
        .def_readonly("shell_values", &ShellEstimate::shell_values)
        .def_readonly("monotone", &ShellEstimate::monotone)
        .def_readonly("budget_exhausted", &ShellEstimate::budget_exhausted);

    m.def("shell_surface_estimate", &shell_surface_estimate, py::arg("f"), py::arg("gauge"),
          py::arg("deltas"), py::arg("config"), py::call_guard<py::gil_scoped_release>());

    // --------------------------------------------------------------- fundsol
    py::class_<ConstantEstimate>(m, "ConstantEstimate")
        .def_readonly("value", &ConstantEstimate::value)
        .def_readonly("error", &ConstantEstimate::error)
        .def_readonly("method", &ConstantEstimate::method)
        .def_readonly("budget", &ConstantEstimate::budget)
        .def_readonly("seed", &ConstantEstimate::seed)
        .def_readonly("warning", &ConstantEstimate::warning);

    py::class_<SigmaRoutes>(m, "SigmaRoutes")
        .def_readonly("volume", &SigmaRoutes::volume)
        .def_readonly("shell", &SigmaRoutes::shell)
        .def_readonly("combined_error", &SigmaRoutes::combined_error)
        .def_readonly("consistent", &SigmaRoutes::consistent);

    m.def("omega_constant", &omega_constant, py::arg("gauge"), py::arg("params"),
          py::arg("config"), py::call_guard<py::gil_scoped_release>());
    m.def("sigma_routes", &sigma_routes, py::arg("gauge"), py::arg("params"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("sigma_constant", &sigma_constant, py::arg("gauge"), py::arg("params"),
          py::arg("config"), py::call_guard<py::gil_scoped_release>());

    py::class_<FundamentalSolution>(m, "FundamentalSolution")
        .def_property_readonly("gauge", [](const FundamentalSolution& s) { return s.gauge; })
        .def_property_readonly("constant", [](const FundamentalSolution& s) { return s.constant; })
        .def_property_readonly("branch",
                               [](const FundamentalSolution& s) {
                                   return s.is_log() ? std::string("log") : std::string("power");
                               })
        .def_property_readonly("pole_sigma",
                               [](const FundamentalSolution& s) { return s.pole_sigma; })
        .def_property_readonly("growing", [](const FundamentalSolution& s) { return s.growing; })
        .def_property_readonly("omega", [](const FundamentalSolution& s) { return s.omega; })
        .def_property_readonly("sigma", [](const FundamentalSolution& s) { return s.sigma; })
        .def("exponent", &FundamentalSolution::exponent)
        .def("__call__",
             [](const FundamentalSolution& s, const Point& x) { return evaluate(s, x); });

    m.def("build_fundamental_solution", &build_fundamental_solution, py::arg("gauge"),
          py::arg("params"), py::arg("config"), py::call_guard<py::gil_scoped_release>());
    m.def("evaluate", &evaluate, py::arg("solution"), py::arg("x"));
    m.def("translated", &translated, py::arg("solution"), py::arg("sigma0"));
    m.def("solution_field", &solution_field, py::arg("solution"));

    py::class_<BumpTestFunction>(m, "BumpTestFunction")
        .def(py::init([](Vector center, double radius, double amplitude) {
                 return BumpTestFunction{std::move(center), radius, amplitude};
             }),
             py::arg("center"), py::arg("radius"), py::arg("amplitude") = 1.0)
        .def("value", &BumpTestFunction::value, py::arg("x"))
        .def("gradient", &BumpTestFunction::gradient, py::arg("x"));

    py::class_<WeakFormResult>(m, "WeakFormResult")
        .def_readonly("value", &WeakFormResult::value)
        .def_readonly("error", &WeakFormResult::error)
        .def_readonly("phi_at_pole", &WeakFormResult::phi_at_pole)
        .def_readonly("excisions", &WeakFormResult::excisions)
        .def_readonly("excision_values", &WeakFormResult::excision_values)
        .def_readonly("excision_errors", &WeakFormResult::excision_errors)
        .def_readonly("budget_exhausted", &WeakFormResult::budget_exhausted);

    m.def("weak_form_test", &weak_form_test, py::arg("solution"), py::arg("phi"),
          py::arg("config"), py::arg("excisions") = std::vector<double>{0.08, 0.04, 0.02},
          py::call_guard<py::gil_scoped_release>());

    m.def("classical_p_laplace_constant", &classical_p_laplace_constant, py::arg("n"),
          py::arg("p"));

    py::class_<ClassicalLimitReport>(m, "ClassicalLimitReport")
        .def_readonly("alpha", &ClassicalLimitReport::alpha)
        .def_readonly("p", &ClassicalLimitReport::p)
        .def_readonly("c_measured", &ClassicalLimitReport::c_measured)
        .def_readonly("c_error", &ClassicalLimitReport::c_error)
        .def_readonly("c_classical", &ClassicalLimitReport::c_classical)
        .def_readonly("adjustment", &ClassicalLimitReport::adjustment)
        .def_readonly("ratio_raw", &ClassicalLimitReport::ratio_raw)
        .def_readonly("ratio_adjusted", &ClassicalLimitReport::ratio_adjusted)
        .def_readonly("exponent", &ClassicalLimitReport::exponent)
        .def_readonly("exponent_classical", &ClassicalLimitReport::exponent_classical);

    m.def("classical_limit_check", &classical_limit_check, py::arg("p"), py::arg("m"),
          py::arg("k"), py::arg("config"), py::call_guard<py::gil_scoped_release>());

    // ------------------------------------------------------------ acceptance
    py::class_<CriterionResult>(m, "CriterionResult")
        .def_readonly("name", &CriterionResult::name)
        .def_readonly("passed", &CriterionResult::passed)
        .def_readonly("measured", &CriterionResult::measured)
        .def_readonly("threshold", &CriterionResult::threshold)
        .def_readonly("seconds", &CriterionResult::seconds)
        .def_readonly("detail", &CriterionResult::detail);

    m.def("acceptance_criterion_names", &acceptance_criterion_names);
    m.def("run_acceptance_criterion", &run_acceptance_criterion, py::arg("name"),
          py::arg("seed") = 20240901, py::call_guard<py::gil_scoped_release>());
}
