#include "anisogauge/fundsol.hpp"

#include <cmath>
#include <stdexcept>

#include "anisogauge/rng.hpp"

namespace anisogauge {

void ConstantEstimate::validate() const {
    if (!(value > 0.0)) throw std::logic_error("ConstantEstimate: value must be positive");
    if (!(error > 0.0)) throw std::logic_error("ConstantEstimate: error must be positive");
}

// ---------------------------------------------------------------------------
// constants
// ---------------------------------------------------------------------------

namespace {

std::function<double(const Vector&)> distortion_integrand(const ProductGauge& g, double exponent) {
    const int m = g.m();
    return [&g, m, exponent](const Vector& x) {
        const double rho = g.theta0_flat(x);
        if (!(rho > 0.0)) return 0.0;
        const double p0 = g.phi_dual().value(x.head(m));
        return std::pow(p0 / rho, exponent);
    };
}

} // namespace

ConstantEstimate omega_constant(const ProductGauge& g, const OperatorParams& params,
                                const QuadratureConfig& cfg) {
    params.check_matches(g);
    if (g.dim() > 6)
        throw std::invalid_argument("omega_constant: desk-scale budgets support m+k <= 6");

    const auto f = distortion_integrand(g, g.alpha() * params.p);
    const IntegralEstimate est = integrate(f, Region::gauge_ball(1.0), g, cfg);

    ConstantEstimate out;
    out.value = est.value;
    out.error = est.error;
    out.method = est.method;
    out.budget = est.evaluations;
    out.seed = cfg.seed;
    out.warning = est.budget_exhausted;
    return out;
}

SigmaRoutes sigma_routes(const ProductGauge& g, const OperatorParams& params,
                         const QuadratureConfig& cfg) {
    const double q = g.homogeneous_dimension();

    SigmaRoutes routes;
    const ConstantEstimate omega = omega_constant(g, params, cfg);
    routes.volume.value = q * omega.value;
    routes.volume.error = q * omega.error;
    routes.volume.method = "volume:" + omega.method;
    routes.volume.budget = omega.budget;
    routes.volume.seed = omega.seed;
    routes.volume.warning = omega.warning;

    QuadratureConfig shell_cfg = cfg;
    shell_cfg.seed = derive_seed(cfg.seed, 0x5e11);
    const auto f = distortion_integrand(g, g.alpha() * params.p);
    const ShellEstimate shell = shell_surface_estimate(f, g, {0.02, 0.01, 0.005}, shell_cfg);
    routes.shell.value = shell.value;
    routes.shell.error = shell.error;
    routes.shell.method = "thin-shell:" + cfg.method_name();
    routes.shell.budget = cfg.budget;
    routes.shell.seed = shell_cfg.seed;
    routes.shell.warning = shell.budget_exhausted || !shell.monotone;

    routes.combined_error = std::hypot(routes.volume.error, routes.shell.error);
    routes.consistent = std::abs(routes.volume.value - routes.shell.value) <=
                        3.0 * routes.combined_error;
    return routes;
}

ConstantEstimate sigma_constant(const ProductGauge& g, const OperatorParams& params,
                                const QuadratureConfig& cfg) {
    const SigmaRoutes routes = sigma_routes(g, params, cfg);
    if (!routes.consistent)
        throw InconsistencyError(
            "sigma_constant: volume route " + std::to_string(routes.volume.value) +
            " and thin-shell route " + std::to_string(routes.shell.value) +
            " disagree beyond 3x combined error " + std::to_string(routes.combined_error));
    ConstantEstimate out = routes.volume;
    out.error = routes.combined_error;
    return out;
}

// ---------------------------------------------------------------------------
// fundamental solution
// ---------------------------------------------------------------------------

double FundamentalSolution::exponent() const {
    if (branch == Branch::Log) return 0.0;
    const double q = gauge.homogeneous_dimension();
    return -(q - params.p) / (params.p - 1.0);
}

FundamentalSolution build_fundamental_solution(const ProductGauge& g, const OperatorParams& params,
                                               const QuadratureConfig& cfg) {
    params.check_matches(g);
    const double q = g.homogeneous_dimension();
    const double p = params.p;

    FundamentalSolution sol(g, params);
    sol.omega = omega_constant(g, params, cfg);
    sol.sigma = sigma_constant(g, params, cfg);

    if (std::abs(p - q) < kLogBranchTolerance) {
        sol.branch = FundamentalSolution::Branch::Log;
        sol.constant = std::pow(sol.sigma.value, -1.0 / (q - 1.0));
    } else {
        sol.branch = FundamentalSolution::Branch::Power;
        sol.constant = (p - 1.0) / (q - p) * std::pow(sol.sigma.value, -1.0 / (p - 1.0));
        sol.growing = q < p;
    }
    return sol;
}

namespace {

double shifted_rho(const FundamentalSolution& sol, const Point& x) {
    Point shifted = x;
    shifted.sigma -= sol.pole_sigma;
    return sol.gauge.theta0(shifted);
}

} // namespace

double evaluate(const FundamentalSolution& sol, const Point& x) {
    sol.gauge.check_point(x);
    const double rho = shifted_rho(sol, x);
    if (rho < kOriginExclusionRadius)
        throw DegeneratePointError("evaluate: at (or numerically at) the pole");
    if (sol.is_log()) return sol.constant * std::log(rho);
    return sol.constant * std::pow(rho, sol.exponent());
}

FundamentalSolution translated(const FundamentalSolution& sol, const Vector& sigma0) {
    if (sigma0.size() != sol.gauge.k())
        throw std::invalid_argument("translated: sigma0 has wrong dimension");
    FundamentalSolution out = sol;
    out.pole_sigma = sigma0;
    return out;
}

ScalarField solution_field(const FundamentalSolution& sol) {
    RadialProfile prof;
    const double c = sol.constant;
    if (sol.is_log()) {
        prof.f = [c](double t) { return c * std::log(t); };
        prof.df = [c](double t) { return c / t; };
        prof.ddf = [c](double t) { return -c / (t * t); };
        prof.name = "fundsol-log";
    } else {
        const double e = sol.exponent();
        prof.f = [c, e](double t) { return c * std::pow(t, e); };
        prof.df = [c, e](double t) { return c * e * std::pow(t, e - 1.0); };
        prof.ddf = [c, e](double t) { return c * e * (e - 1.0) * std::pow(t, e - 2.0); };
        prof.name = "fundsol-power";
    }
    prof.singular_at_zero = true;
    return make_radial_field(sol.gauge, prof, sol.pole_sigma);
}

// ---------------------------------------------------------------------------
// bump test functions
// ---------------------------------------------------------------------------

double BumpTestFunction::value(const Vector& x) const {
    if (x.size() != center.size())
        throw std::invalid_argument("BumpTestFunction: dimension mismatch");
    const double s = (x - center).squaredNorm() / (radius * radius);
    if (s >= 1.0) return 0.0;
    const double t = 1.0 - s;
    return amplitude * t * t * t * t;
}

Vector BumpTestFunction::gradient(const Vector& x) const {
    if (x.size() != center.size())
        throw std::invalid_argument("BumpTestFunction: dimension mismatch");
    const Vector d = x - center;
    const double s = d.squaredNorm() / (radius * radius);
    if (s >= 1.0) return Vector::Zero(x.size());
    const double t = 1.0 - s;
    return (-8.0 * amplitude * t * t * t / (radius * radius)) * d;
}

// ---------------------------------------------------------------------------
// weak form
// ---------------------------------------------------------------------------

WeakFormResult weak_form_test(const FundamentalSolution& sol, const BumpTestFunction& phi,
                              const QuadratureConfig& cfg, const std::vector<double>& excisions) {
    cfg.validate();
    const ProductGauge& g = sol.gauge;
    if (g.dim() > 4)
        throw std::invalid_argument("weak_form_test: desk-scale budgets support m+k <= 4");
    if (phi.center.size() != g.dim())
        throw std::invalid_argument("weak_form_test: test function dimension mismatch");
    if (sol.growing)
        throw std::invalid_argument("weak_form_test: Q < p regime is flagged and not verified");
    if (excisions.size() < 2)
        throw std::invalid_argument("weak_form_test: need at least two excision radii");

    std::vector<double> eps = excisions;
    std::sort(eps.begin(), eps.end(), std::greater<double>());
    for (std::size_t i = 0; i + 1 < eps.size(); ++i)
        if (std::abs(eps[i] - 2.0 * eps[i + 1]) > 1e-12 * eps[i])
            throw std::invalid_argument("weak_form_test: excision schedule must halve");

    // upper bound of rho(z, sigma - pole) over the support ball of phi
    const Point c = g.split(phi.center);
    const double a_phi = g.phi().equivalence_bounds().first;   // Phi0 <= |.| / a_phi
    const double a_psi = g.psi().equivalence_bounds().first;
    const double bz = (c.z.norm() + phi.radius) / a_phi;
    const double bs = ((c.sigma - sol.pole_sigma).norm() + phi.radius) / a_psi;
    const double e = 2.0 * (g.alpha() + 1.0);
    const double rho_hi =
        1.02 * std::pow(std::pow(bz, e) + std::pow(e * bs, 2.0), 1.0 / e);

    // geometric sub-shells from the finest excision outward; every coarser
    // excision falls on a sub-shell boundary, so each I(eps) is a tail sum
    std::vector<double> radii{eps.back()};
    while (radii.back() < rho_hi) radii.push_back(std::min(2.0 * radii.back(), rho_hi));

    const ScalarField field = solution_field(sol);
    auto integrand = [&](const Vector& x) {
        const Vector grad_phi = phi.gradient(x);
        if (grad_phi.isZero(0.0)) return 0.0;
        const Vector fl = flux(g, sol.params, field, g.split(x));
        return fl.dot(grad_phi);
    };

    const std::int64_t shells = static_cast<std::int64_t>(radii.size()) - 1;
    QuadratureConfig sub = cfg;
    sub.budget = std::max<std::int64_t>(1000, cfg.budget / std::max<std::int64_t>(shells, 1));

    std::vector<double> shell_vals(shells), shell_errs(shells);
    bool exhausted = false;
    for (std::int64_t l = 0; l < shells; ++l) {
        sub.seed = derive_seed(cfg.seed, 0xaa00 + static_cast<std::uint64_t>(l));
        Region shell = Region::gauge_shell(radii[l], radii[l + 1]).with_sigma_offset(sol.pole_sigma);
        const IntegralEstimate est = integrate(integrand, shell, g, sub);
        shell_vals[l] = est.value;
        shell_errs[l] = est.error;
        exhausted = exhausted || est.budget_exhausted;
    }

    WeakFormResult out;
    Vector pole = Vector::Zero(g.dim());
    pole.tail(g.k()) = sol.pole_sigma;
    out.phi_at_pole = phi.value(pole);
    out.budget_exhausted = exhausted;
    out.excisions = eps;
    // I(eps_j): tail sums starting at the sub-shell whose inner radius is eps_j
    for (double epsilon : eps) {
        double val = 0.0, err_sq = 0.0;
        for (std::int64_t l = 0; l < shells; ++l) {
            if (radii[l] >= epsilon * (1.0 - 1e-12)) {
                val += shell_vals[l];
                err_sq += shell_errs[l] * shell_errs[l];
            }
        }
        out.excision_values.push_back(val);
        out.excision_errors.push_back(std::sqrt(err_sq));
    }

    // Neville extrapolation of I(eps) to eps = 0 across the whole schedule
    // (the boundary mismatch has both linear and quadratic terms in eps); the
    // spread against the linear two-point extrapolation bounds the model error
    const std::size_t n = eps.size();
    double value = 0.0, stat_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) w *= eps[j] / (eps[j] - eps[i]);
        value += w * out.excision_values[i];
        stat_sq += w * w * out.excision_errors[i] * out.excision_errors[i];
    }
    const double linear = 2.0 * out.excision_values[n - 1] - out.excision_values[n - 2];
    out.value = value;
    out.error = std::sqrt(stat_sq) + 0.5 * std::abs(value - linear);
    return out;
}

// ---------------------------------------------------------------------------
// classical limit
// ---------------------------------------------------------------------------

double classical_p_laplace_constant(int n, double p) {
    if (n < 1) throw std::invalid_argument("classical_p_laplace_constant: n must be >= 1");
    if (!(p > 1.0) || std::abs(p - n) < 1e-12)
        throw std::invalid_argument("classical_p_laplace_constant: need p > 1, p != n");
    const double unit_ball = std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
    return (p - 1.0) / (n - p) * std::pow(n * unit_ball, -1.0 / (p - 1.0));
}

ClassicalLimitReport classical_limit_check(double p, int m, int k, const QuadratureConfig& cfg) {
    const double alpha = 1e-3;
    const int n = m + k;
    const ProductGauge g(MinkowskiNorm::euclidean(m), MinkowskiNorm::euclidean(k), alpha);
    const OperatorParams params{alpha, p};
    const FundamentalSolution sol = build_fundamental_solution(g, params, cfg);

    ClassicalLimitReport rep;
    rep.alpha = alpha;
    rep.p = p;
    rep.m = m;
    rep.k = k;
    rep.c_measured = sol.constant;
    // first-order error propagation through C ~ sigma^(-1/(p-1))
    rep.c_error = std::abs(sol.constant) * sol.sigma.error / sol.sigma.value / (p - 1.0);
    rep.c_classical = classical_p_laplace_constant(n, p);
    rep.adjustment = std::pow(2.0, static_cast<double>(k) / (p - 1.0));
    rep.ratio_raw = rep.c_measured / rep.c_classical;
    rep.ratio_adjusted = rep.c_measured / (rep.adjustment * rep.c_classical);
    rep.exponent = sol.exponent();
    rep.exponent_classical = -(n - p) / (p - 1.0);
    return rep;
}

} // namespace anisogauge
