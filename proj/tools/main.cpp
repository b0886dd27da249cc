// anisogauge: evaluate anisotropic product gauges and their dual transforms,
// apply the degenerate quasilinear operators, estimate fundamental-solution
// constants, and run the verification battery.
//
// Exit codes: 0 all checks passed, 1 a verification threshold failed,
// 2 usage or validation error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "anisogauge/acceptance.hpp"
#include "anisogauge/fundsol.hpp"
#include "anisogauge/operators.hpp"
#include "anisogauge/quadrature.hpp"
#include "anisogauge/rng.hpp"
#include "anisogauge/serialize.hpp"
#include "anisogauge/version.hpp"

namespace ag = anisogauge;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

// Inputs may be a path to a JSON file or inline JSON.
json load_json_arg(const std::string& arg) {
    if (std::filesystem::exists(arg)) {
        std::ifstream in(arg);
        return json::parse(in);
    }
    return json::parse(arg);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(out_path);
        out << text << "\n";
    }
}

json make_manifest(const std::string& command, std::uint64_t seed) {
    return json{{"command", command},
                {"seed", seed},
                {"version", ag::kVersion},
                {"threads", ag::quadrature_threads()}};
}

struct CommonOpts {
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 20240901;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--out", opts.out, "write the report to this path instead of stdout");
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", opts.seed, "seed for all randomized checks");
}

// flat reports render in CSV as key,value rows (nested keys dotted)
void flatten_json(const json& j, const std::string& prefix, std::ostringstream& os) {
    for (const auto& [key, value] : j.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            flatten_json(value, name, os);
        } else {
            os << name << "," << value.dump() << "\n";
        }
    }
}

void emit_report(const json& report, const CommonOpts& opts) {
    if (opts.format == "csv") {
        std::ostringstream os;
        os << "key,value\n";
        flatten_json(report, "", os);
        emit(os.str(), opts.out);
    } else {
        emit(report.dump(2), opts.out);
    }
}

// ---------------------------------------------------------------------------
// norms-verify
// ---------------------------------------------------------------------------

int cmd_norms_verify(const std::string& norm_arg, int samples, const CommonOpts& opts) {
    const ag::MinkowskiNorm norm = ag::norm_from_json(load_json_arg(norm_arg));
    const ag::DualityReport rep = ag::verify_duality_suite(norm, samples, opts.seed);

    // Finsler Laplacian of the half-squared dual and a cubic radial profile
    const double h = 1e-4;
    const ag::MinkowskiNorm dual = norm.dual();
    ag::ScalarField half_sq;
    half_sq.value = [dual](const ag::Vector& x) {
        const double v = dual.value(x);
        return 0.5 * v * v;
    };
    half_sq.gradient = [dual](const ag::Vector& x) {
        return (dual.value(x) * dual.gradient(x)).eval();
    };
    ag::ScalarField cubic;
    cubic.value = [dual](const ag::Vector& x) { return std::pow(dual.value(x), 3.0); };
    cubic.gradient = [dual](const ag::Vector& x) {
        return (3.0 * dual.value(x) * dual.value(x) * dual.gradient(x)).eval();
    };

    std::mt19937_64 rng = ag::make_rng(opts.seed, 99);
    double laplacian_residual = 0.0;
    for (int i = 0; i < 20; ++i) {
        const ag::Vector x = ag::random_test_point(rng, norm.dim(), 1.5, 0.5);
        laplacian_residual = std::max(
            laplacian_residual, std::abs(ag::finsler_laplacian(norm, half_sq, x, h) - norm.dim()));
        const double t = dual.value(x);
        const double expected = 6.0 * t + (norm.dim() - 1) * 3.0 * t * t / t;
        laplacian_residual = std::max(
            laplacian_residual, std::abs(ag::finsler_laplacian(norm, cubic, x, h) - expected) /
                                    std::max(1.0, std::abs(expected)));
    }

    const double identity_threshold = 1e-9;
    const double cs_threshold = 1e-12;
    const double double_dual_threshold = 1e-6;
    const double laplacian_threshold = 10.0 * h * h;
    const bool pass = rep.worst_identity_residual() <= identity_threshold &&
                      rep.cauchy_schwarz_violation <= cs_threshold &&
                      rep.double_dual <= double_dual_threshold &&
                      laplacian_residual <= laplacian_threshold;

    json report = make_manifest("norms-verify", opts.seed);
    report["norm"] = ag::norm_to_json(norm);
    report["samples"] = samples;
    report["residuals"] = {{"gradient_on_sphere_primal", rep.gradient_on_sphere_primal},
                           {"gradient_on_sphere_dual", rep.gradient_on_sphere_dual},
                           {"gradient_inversion_primal", rep.gradient_inversion_primal},
                           {"gradient_inversion_dual", rep.gradient_inversion_dual},
                           {"euler", rep.euler},
                           {"cauchy_schwarz_violation", rep.cauchy_schwarz_violation},
                           {"double_dual", rep.double_dual},
                           {"laplacian_radial", laplacian_residual}};
    report["thresholds"] = {{"identities", identity_threshold},
                            {"cauchy_schwarz", cs_threshold},
                            {"double_dual", double_dual_threshold},
                            {"laplacian_radial", laplacian_threshold}};
    report["pass"] = pass;
    emit_report(report, opts);
    return pass ? kExitPass : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// gauge-check
// ---------------------------------------------------------------------------

int cmd_gauge_check(const std::string& gauge_arg, int samples, const CommonOpts& opts) {
    const ag::ProductGauge gauge = ag::gauge_from_json(load_json_arg(gauge_arg));

    std::mt19937_64 rng = ag::make_rng(opts.seed, 7);
    ag::VariationalConfig vcfg;
    double certificate = 0.0, eikonal = 0.0, homogeneity = 0.0;
    for (int i = 0; i < samples; ++i) {
        const ag::Point x = ag::sample_smooth_point(gauge, rng, 0.5, 2.0, 1e-3);
        const double closed = gauge.theta0(x);
        vcfg.seed = ag::derive_seed(opts.seed, i);
        certificate = std::max(certificate,
                               std::abs(ag::theta0_variational(gauge, x, vcfg) - closed) / closed);
        eikonal = std::max(eikonal, std::abs(gauge.eikonal_residual(x)));
        for (double t : {0.1, 1.0, 7.0}) {
            const ag::Point xt = gauge.dilate(t, x);
            homogeneity = std::max(homogeneity,
                                   std::abs(gauge.theta0(xt) - t * closed) / (t * closed));
            homogeneity = std::max(homogeneity, std::abs(gauge.theta(xt) - t * gauge.theta(x)) /
                                                    (t * gauge.theta(x)));
        }
    }

    const bool pass = certificate <= 1e-4 && eikonal <= 1e-9 && homogeneity <= 1e-10;
    json report = make_manifest("gauge-check", opts.seed);
    report["gauge"] = ag::gauge_to_json(gauge);
    report["homogeneous_dimension"] = gauge.homogeneous_dimension();
    report["samples"] = samples;
    report["residuals"] = {{"legendre_certificate", certificate},
                           {"eikonal", eikonal},
                           {"dilation_homogeneity", homogeneity}};
    report["thresholds"] = {{"legendre_certificate", 1e-4},
                            {"eikonal", 1e-9},
                            {"dilation_homogeneity", 1e-10}};
    report["pass"] = pass;
    emit_report(report, opts);
    return pass ? kExitPass : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// op-radial-check
// ---------------------------------------------------------------------------

int cmd_op_radial_check(const std::string& gauge_arg, double p, const std::string& profile,
                        int samples, double h, const CommonOpts& opts) {
    const ag::ProductGauge gauge = ag::gauge_from_json(load_json_arg(gauge_arg));
    const ag::OperatorParams params{gauge.alpha(), p};
    params.validate();

    ag::RadialProfile prof;
    if (profile == "candidate") {
        const double q = gauge.homogeneous_dimension();
        prof = std::abs(p - q) < 1e-9 ? ag::make_profile("log")
                                      : ag::make_profile("power", -(q - p) / (p - 1.0));
    } else {
        prof = ag::make_profile(profile);
    }

    const auto rep = ag::radial_consistency_report(gauge, params, prof, samples, opts.seed, h);
    const bool pass = rep.max_rel_deviation <= 1e-5 && rep.convergence_ratio >= 3.5 &&
                      rep.linearity_residual <= 1e-8;

    json report = make_manifest("op-radial-check", opts.seed);
    report["gauge"] = ag::gauge_to_json(gauge);
    report["p"] = p;
    report["profile"] = prof.name;
    report["samples"] = samples;
    report["max_rel_deviation"] = rep.max_rel_deviation;
    report["convergence_ratio"] = rep.convergence_ratio;
    report["p2_linearity_residual"] = rep.linearity_residual;
    report["thresholds"] = {{"max_rel_deviation", 1e-5},
                            {"convergence_ratio_min", 3.5},
                            {"p2_linearity_residual", 1e-8}};
    report["pass"] = pass;
    emit_report(report, opts);
    return pass ? kExitPass : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// fundsol
// ---------------------------------------------------------------------------

std::vector<double> parse_list(const std::string& arg) {
    std::vector<double> values;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
    if (values.empty()) throw std::invalid_argument("empty numeric list");
    return values;
}

int cmd_fundsol(const std::string& gauge_arg, const std::string& alphas_arg,
                const std::string& ps_arg, const ag::QuadratureConfig& qcfg, bool weak_test,
                const CommonOpts& opts) {
    const json gauge_json = load_json_arg(gauge_arg);
    const std::vector<double> alphas = parse_list(alphas_arg);
    const std::vector<double> ps = parse_list(ps_arg);

    if (weak_test && (alphas.size() != 1 || ps.size() != 1))
        throw std::invalid_argument("--weak-test requires a single (alpha, p) pair");

    std::vector<json> rows;
    for (double alpha : alphas) {
        json gj = gauge_json;
        gj["alpha"] = alpha;
        const ag::ProductGauge gauge = ag::gauge_from_json(gj);
        for (double p : ps) {
            const ag::OperatorParams params{alpha, p};
            params.validate();
            if (weak_test && gauge.homogeneous_dimension() <= p)
                throw std::invalid_argument(
                    "--weak-test: refusing Q <= p (Q = " +
                    std::to_string(gauge.homogeneous_dimension()) +
                    "): the solution does not decay and the delta property is not verified there");

            const ag::FundamentalSolution sol = ag::build_fundamental_solution(gauge, params, qcfg);
            json row;
            row["gauge"] = ag::gauge_to_json(gauge);
            row["alpha"] = alpha;
            row["p"] = p;
            row["Q"] = gauge.homogeneous_dimension();
            row["omega"] = sol.omega.value;
            row["omega_err"] = sol.omega.error;
            row["sigma"] = sol.sigma.value;
            row["sigma_err"] = sol.sigma.error;
            row["C"] = sol.constant;
            row["branch"] = sol.is_log() ? "log" : "power";
            row["exponent"] = sol.exponent();
            row["growing"] = sol.growing;
            row["method"] = qcfg.method_name();
            row["seed"] = qcfg.seed;
            row["budget"] = qcfg.budget;

            if (weak_test) {
                ag::BumpTestFunction phi;
                phi.center = ag::Vector::Zero(gauge.dim());
                phi.radius = 0.8;
                phi.amplitude = 1.0;
                ag::QuadratureConfig wcfg = qcfg;
                wcfg.seed = ag::derive_seed(qcfg.seed, 0xdead);
                const ag::WeakFormResult wf = ag::weak_form_test(sol, phi, wcfg);
                row["weak_form"] = {{"value", wf.value},
                                    {"error", wf.error},
                                    {"phi_at_pole", wf.phi_at_pole},
                                    {"ratio", wf.value / wf.phi_at_pole},
                                    {"excisions", wf.excisions},
                                    {"excision_values", wf.excision_values}};
            }
            rows.push_back(std::move(row));
        }
    }

    json manifest = make_manifest("fundsol", qcfg.seed);
    manifest["quadrature"] = ag::quadrature_config_to_json(qcfg);

    if (opts.format == "csv") {
        std::ostringstream os;
        os << "# manifest " << manifest.dump() << "\n";
        os << "alpha,p,Q,omega,omega_err,sigma,sigma_err,C,branch,exponent,growing\n";
        os.precision(12);
        for (const auto& row : rows) {
            os << row["alpha"].get<double>() << "," << row["p"].get<double>() << ","
               << row["Q"].get<double>() << "," << row["omega"].get<double>() << ","
               << row["omega_err"].get<double>() << "," << row["sigma"].get<double>() << ","
               << row["sigma_err"].get<double>() << "," << row["C"].get<double>() << ","
               << row["branch"].get<std::string>() << "," << row["exponent"].get<double>() << ","
               << (row["growing"].get<bool>() ? 1 : 0) << "\n";
        }
        emit(os.str(), opts.out);
    } else {
        json out = manifest;
        out["results"] = rows;
        emit(out.dump(2), opts.out);
    }

    if (weak_test) {
        const auto& wf = rows.front().at("weak_form");
        const double ratio = wf.at("ratio").get<double>();
        if (std::abs(ratio - 1.0) > 0.02) return kExitCheckFailed;
    }
    return kExitPass;
}

// ---------------------------------------------------------------------------
// suite
// ---------------------------------------------------------------------------

int cmd_suite(const std::vector<std::string>& only, const CommonOpts& opts) {
    const auto known = ag::acceptance_criterion_names();
    for (const auto& name : only) {
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw std::invalid_argument("unknown criterion '" + name + "'");
    }

    const auto results = ag::run_acceptance_suite(only, opts.seed);
    json manifest = make_manifest("suite", opts.seed);

    std::ostringstream csv;
    csv << "# manifest " << manifest.dump() << "\n";
    csv << "criterion,measured,threshold,pass,seconds\n";
    csv.precision(6);
    bool all_pass = true;
    for (const auto& r : results) {
        csv << r.name << "," << std::scientific << r.measured << "," << r.threshold << ","
            << (r.passed ? "pass" : "fail") << "," << std::defaultfloat << r.seconds << "\n";
        all_pass = all_pass && r.passed;
        std::fprintf(stderr, "[%s] %-22s measured %.3e threshold %.3e (%.1f s)\n",
                     r.passed ? "PASS" : "FAIL", r.name.c_str(), r.measured, r.threshold,
                     r.seconds);
    }

    if (opts.format == "json") {
        json out = manifest;
        out["results"] = json::array();
        for (const auto& r : results)
            out["results"].push_back({{"criterion", r.name},
                                      {"measured", r.measured},
                                      {"threshold", r.threshold},
                                      {"pass", r.passed},
                                      {"seconds", r.seconds},
                                      {"detail", r.detail}});
        emit(out.dump(2), opts.out);
    } else {
        emit(csv.str(), opts.out);
    }
    return all_pass ? kExitPass : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"anisotropic Minkowski gauges, degenerate quasilinear operators, and their "
                 "fundamental solutions"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    CommonOpts norms_opts;
    std::string norm_arg;
    int norm_samples = 200;
    auto* norms = app.add_subcommand("norms-verify", "verify the layer-norm identity suite");
    norms->add_option("--norm", norm_arg, "norm JSON (path or inline)")->required();
    norms->add_option("--samples", norm_samples, "random sample count");
    add_common(norms, norms_opts);

    CommonOpts gauge_opts;
    std::string gauge_arg;
    int gauge_samples = 100;
    auto* gauge = app.add_subcommand("gauge-check",
                                     "certify the dual gauge closed form and eikonal identity");
    gauge->add_option("--gauge", gauge_arg, "gauge JSON (path or inline)")->required();
    gauge->add_option("--samples", gauge_samples, "random sample count");
    add_common(gauge, gauge_opts);

    CommonOpts op_opts;
    std::string op_gauge_arg, op_profile = "square";
    double op_p = 2.0, op_h = 0.0;
    int op_samples = 20;
    auto* op = app.add_subcommand("op-radial-check",
                                  "compare the difference operator with the radial action formula");
    op->add_option("--gauge", op_gauge_arg, "gauge JSON (path or inline)")->required();
    op->add_option("--p", op_p, "operator exponent p in (1, inf)");
    op->add_option("--profile", op_profile,
                   "radial profile: identity|square|log|power:<gamma>|candidate");
    op->add_option("--samples", op_samples, "random sample count");
    op->add_option("--step", op_h, "difference step (default 1e-4)");
    add_common(op, op_opts);

    CommonOpts fund_opts;
    std::string fund_gauge_arg, fund_alpha = "1.0", fund_p = "2.0", fund_method = "monte-carlo";
    std::int64_t fund_budget = 4'000'000;
    double fund_rel_err = 1e-3;
    bool weak_test = false;
    auto* fund = app.add_subcommand("fundsol",
                                    "estimate omega/sigma constants and assemble the solution");
    fund->add_option("--gauge", fund_gauge_arg, "gauge JSON (path or inline)")->required();
    fund->add_option("--alpha", fund_alpha, "alpha, or comma list for a sweep");
    fund->add_option("--p", fund_p, "p, or comma list for a sweep");
    fund->add_option("--budget", fund_budget, "integrand evaluation budget");
    fund->add_option("--rel-err", fund_rel_err, "target relative error");
    fund->add_option("--method", fund_method,
                     "tensor-gauss|adaptive|monte-carlo|quasi-monte-carlo");
    fund->add_flag("--weak-test", weak_test, "verify the weak-form delta property");
    add_common(fund, fund_opts);

    CommonOpts suite_opts;
    suite_opts.format = "csv";
    std::vector<std::string> suite_only;
    auto* suite = app.add_subcommand("suite", "run the acceptance criteria battery");
    suite->add_option("--only", suite_only, "restrict to these criteria")->delimiter(',');
    add_common(suite, suite_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (norms->parsed()) return cmd_norms_verify(norm_arg, norm_samples, norms_opts);
        if (gauge->parsed()) return cmd_gauge_check(gauge_arg, gauge_samples, gauge_opts);
        if (op->parsed())
            return cmd_op_radial_check(op_gauge_arg, op_p, op_profile, op_samples, op_h, op_opts);
        if (fund->parsed()) {
            ag::QuadratureConfig qcfg;
            qcfg.method = ag::QuadratureConfig::parse_method(fund_method);
            qcfg.budget = fund_budget;
            qcfg.target_rel_error = fund_rel_err;
            qcfg.seed = fund_opts.seed;
            qcfg.validate();
            return cmd_fundsol(fund_gauge_arg, fund_alpha, fund_p, qcfg, weak_test, fund_opts);
        }
        if (suite->parsed()) return cmd_suite(suite_only, suite_opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: invalid JSON: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitUsage;
}
