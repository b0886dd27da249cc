#include "anisogauge/norm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "anisogauge/fd.hpp"
#include "anisogauge/rng.hpp"

namespace anisogauge {

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

MinkowskiNorm MinkowskiNorm::euclidean(int dim) {
    if (dim < 1) throw std::invalid_argument("euclidean norm: dim must be >= 1");
    MinkowskiNorm n;
    n.family_ = NormFamily::Euclidean;
    n.dim_ = dim;
    return n;
}

MinkowskiNorm MinkowskiNorm::power(int dim, double q) {
    if (dim < 1) throw std::invalid_argument("power norm: dim must be >= 1");
    if (!(q > 1.0) || !std::isfinite(q))
        throw std::invalid_argument("power norm: q must exceed 1 (q=1 and q=inf are not C^2 away from 0)");
    MinkowskiNorm n;
    n.family_ = NormFamily::PowerQ;
    n.dim_ = dim;
    n.q_ = q;
    return n;
}

MinkowskiNorm MinkowskiNorm::quadratic(const Matrix& a) {
    if (a.rows() < 1 || a.rows() != a.cols())
        throw std::invalid_argument("quadratic norm: matrix must be square and nonempty");
    const double scale = a.cwiseAbs().maxCoeff();
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale))
        throw std::invalid_argument("quadratic norm: matrix must be symmetric");
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("quadratic norm: matrix must be positive definite");
    auto data = std::make_shared<QuadraticData>();
    data->a = a;
    data->a_inv = llt.solve(Matrix::Identity(a.rows(), a.cols()));
    MinkowskiNorm n;
    n.family_ = NormFamily::Quadratic;
    n.dim_ = static_cast<int>(a.rows());
    n.quad_ = std::move(data);
    return n;
}

MinkowskiNorm MinkowskiNorm::custom(int dim, ValueFn value, GradientFn gradient,
                                    ValueFn dual_value, GradientFn dual_gradient) {
    if (dim < 1) throw std::invalid_argument("custom norm: dim must be >= 1");
    if (!value || !gradient)
        throw std::invalid_argument("custom norm: value and gradient evaluators are required");
    auto data = std::make_shared<CustomData>();
    data->value = std::move(value);
    data->gradient = std::move(gradient);
    data->dual_value = std::move(dual_value);
    data->dual_gradient = std::move(dual_gradient);

    // Sampled sanity checks of the Minkowski-norm invariants: evenness and
    // positive 1-homogeneity.
    std::mt19937_64 rng = make_rng(0x5eedb0, dim);
    for (int i = 0; i < 16; ++i) {
        const Vector x = random_test_point(rng, dim);
        const double v = data->value(x);
        if (!(v > 0.0))
            throw std::invalid_argument("custom norm: value must be positive away from 0");
        if (std::abs(data->value(-x) - v) > 1e-10 * v)
            throw std::invalid_argument("custom norm: norms must be even, N(-x) = N(x)");
        for (double lambda : {0.25, 3.0}) {
            if (std::abs(data->value(lambda * x) - lambda * v) > 1e-10 * lambda * v)
                throw std::invalid_argument("custom norm: not positively 1-homogeneous");
        }
    }

    // Equivalence constants by direction sampling; shaded outward so boxes
    // built from them always contain the unit ball.
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        Vector d = random_direction(rng, dim);
        double v = data->value(d);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    data->bounds = {0.98 * lo, 1.02 * hi};

    MinkowskiNorm n;
    n.family_ = NormFamily::Custom;
    n.dim_ = dim;
    n.custom_ = std::move(data);
    return n;
}

double MinkowskiNorm::power_exponent() const {
    if (family_ != NormFamily::PowerQ)
        throw std::logic_error("power_exponent: not a power-q norm");
    return q_;
}

const Matrix& MinkowskiNorm::quadratic_matrix() const {
    if (family_ != NormFamily::Quadratic)
        throw std::logic_error("quadratic_matrix: not a quadratic norm");
    return quad_->a;
}

void MinkowskiNorm::check_dim(Eigen::Ref<const Vector> x) const {
    if (x.size() != dim_)
        throw std::invalid_argument("norm: dimension mismatch (expected " + std::to_string(dim_) +
                                    ", got " + std::to_string(x.size()) + ")");
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

double MinkowskiNorm::value(Eigen::Ref<const Vector> x) const {
    check_dim(x);
    switch (family_) {
        case NormFamily::Euclidean:
            return x.norm();
        case NormFamily::PowerQ: {
            // scale out the max coordinate so pow() stays in range
            double m = x.cwiseAbs().maxCoeff();
            if (m == 0.0) return 0.0;
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) s += std::pow(std::abs(x[i]) / m, q_);
            return m * std::pow(s, 1.0 / q_);
        }
        case NormFamily::Quadratic:
            return std::sqrt(x.dot(quad_->a * x));
        case NormFamily::Custom:
            return custom_->value(x);
    }
    return 0.0;
}

Vector MinkowskiNorm::gradient(Eigen::Ref<const Vector> x) const {
    check_dim(x);
    if (x.norm() < kOriginExclusionRadius)
        throw DegeneratePointError("norm gradient: point inside the origin exclusion ball");
    switch (family_) {
        case NormFamily::Euclidean:
            return x / x.norm();
        case NormFamily::PowerQ: {
            const double n = value(x);
            Vector g(dim_);
            for (int i = 0; i < dim_; ++i) {
                double a = std::abs(x[i]);
                g[i] = a == 0.0 ? 0.0 : std::copysign(std::pow(a / n, q_ - 1.0), x[i]);
            }
            return g;
        }
        case NormFamily::Quadratic:
            return (quad_->a * x) / value(x);
        case NormFamily::Custom:
            return custom_->gradient(x);
    }
    return Vector::Zero(dim_);
}

bool MinkowskiNorm::has_closed_form_dual() const {
    if (family_ == NormFamily::Custom)
        return static_cast<bool>(custom_->dual_value);
    return true;
}

MinkowskiNorm MinkowskiNorm::dual() const {
    switch (family_) {
        case NormFamily::Euclidean:
            return *this;
        case NormFamily::PowerQ:
            return power(dim_, q_ / (q_ - 1.0));
        case NormFamily::Quadratic:
            return quadratic(quad_->a_inv);
        case NormFamily::Custom:
            if (!custom_->dual_value)
                throw std::logic_error("dual: custom norm has no dual evaluator");
            if (!custom_->dual_gradient)
                throw std::logic_error("dual: custom norm has no dual gradient evaluator");
            return custom(dim_, custom_->dual_value, custom_->dual_gradient,
                          custom_->value, custom_->gradient);
    }
    throw std::logic_error("dual: unknown family");
}

std::pair<double, double> MinkowskiNorm::equivalence_bounds() const {
    switch (family_) {
        case NormFamily::Euclidean:
            return {1.0, 1.0};
        case NormFamily::PowerQ: {
            // extremes of the l^q norm on the Euclidean unit sphere
            double c = std::pow(static_cast<double>(dim_), 1.0 / q_ - 0.5);
            return {std::min(1.0, c), std::max(1.0, c)};
        }
        case NormFamily::Quadratic: {
            Eigen::SelfAdjointEigenSolver<Matrix> es(quad_->a);
            return {std::sqrt(es.eigenvalues().minCoeff()), std::sqrt(es.eigenvalues().maxCoeff())};
        }
        case NormFamily::Custom:
            return custom_->bounds;
    }
    return {1.0, 1.0};
}

std::string MinkowskiNorm::family_name() const {
    switch (family_) {
        case NormFamily::Euclidean: return "euclidean";
        case NormFamily::PowerQ: return "power";
        case NormFamily::Quadratic: return "quadratic";
        case NormFamily::Custom: return "custom";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// variational dual
// ---------------------------------------------------------------------------

void DualResolution::validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("DualResolution: tolerance must be positive");
    if (multistarts < 1) throw std::invalid_argument("DualResolution: multistarts must be >= 1");
    if (max_iterations < 1) throw std::invalid_argument("DualResolution: max_iterations must be >= 1");
}

namespace {

// Projected gradient ascent of the linear objective <x, xi> on {N(xi)=1}.
// The constraint set is strictly convex, so every local maximum is global;
// multi-starts guard against implementation bugs rather than local optima.
struct AscentOutcome {
    double value = -std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
};

AscentOutcome sphere_ascent(const MinkowskiNorm& n, const Vector& x, Vector xi,
                            double tol, int max_iters) {
    const double scale = std::max(x.norm(), 1e-30);
    xi /= n.value(xi);
    double obj = x.dot(xi);
    AscentOutcome out;
    double step = 1.0;
    for (int it = 0; it < max_iters; ++it) {
        out.iterations = it + 1;
        // Riemannian gradient: tangential part of x at xi on {N = 1};
        // stationarity means x is parallel to the sphere normal grad N(xi)
        const Vector normal = n.gradient(xi);
        const Vector tangential = x - (x.dot(normal) / normal.squaredNorm()) * normal;
        if (tangential.norm() <= tol * std::max(1.0, scale)) {
            out.converged = true;
            break;
        }
        auto probe = [&](double t) {
            Vector trial = xi + (t / scale) * tangential;
            const double tn = n.value(trial);
            return tn > 1e-300 ? x.dot(trial) / tn : -std::numeric_limits<double>::infinity();
        };

        double t = step;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            if (probe(t) >= obj + 1e-4 * (t / scale) * tangential.squaredNorm()) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            // backtracking exhausted at machine precision: stationary
            out.converged = true;
            break;
        }
        // refine by ternary search; plain Armijo zig-zags on elongated spheres
        double lo = 0.0, hi = 2.0 * t;
        for (int r = 0; r < 40; ++r) {
            const double m1 = lo + (hi - lo) / 3.0;
            const double m2 = hi - (hi - lo) / 3.0;
            if (probe(m1) < probe(m2)) lo = m1; else hi = m2;
        }
        const double t_best = probe(t) >= probe(0.5 * (lo + hi)) ? t : 0.5 * (lo + hi);
        Vector best = xi + (t_best / scale) * tangential;
        best /= n.value(best);
        const double best_obj = x.dot(best);
        if (best_obj <= obj) {
            out.converged = true;
            break;
        }
        xi = std::move(best);
        obj = best_obj;
        step = std::clamp(t_best * 2.0, 1e-9, 1e6);
    }
    out.value = obj;
    return out;
}

} // namespace

double dual_value(const MinkowskiNorm& n, const Vector& x, const DualResolution& res) {
    res.validate();
    if (x.size() != n.dim()) throw std::invalid_argument("dual_value: dimension mismatch");
    if (x.norm() == 0.0) return 0.0;

    if (res.mode == DualResolution::Mode::ClosedForm) {
        if (!n.has_closed_form_dual())
            throw std::logic_error("dual_value: no closed-form dual for this norm");
        return n.dual().value(x);
    }

    std::mt19937_64 rng = make_rng(res.seed);
    double best = -std::numeric_limits<double>::infinity();
    bool any_converged = false;
    int total_iters = 0;

    for (int s = 0; s < res.multistarts; ++s) {
        Vector xi;
        if (s == 0) {
            xi = x / n.value(x);
        } else if (s == 1) {
            xi = -x;
        } else if (s < 2 + n.dim()) {
            // sign-flip orbit of the normalized input
            xi = x / n.value(x);
            xi[s - 2] = -xi[s - 2];
        } else if (s < 2 + 2 * n.dim()) {
            xi = Vector::Unit(n.dim(), s - 2 - n.dim());
        } else {
            xi = random_direction(rng, n.dim());
        }
        AscentOutcome out = sphere_ascent(n, x, xi, res.tolerance, res.max_iterations);
        best = std::max(best, out.value);
        any_converged = any_converged || out.converged;
        total_iters += out.iterations;
    }

    if (!any_converged)
        throw ConvergenceError("dual_value: variational solver hit the iteration limit", best,
                               total_iters);
    return best;
}

// ---------------------------------------------------------------------------
// duality identity suite
// ---------------------------------------------------------------------------

double DualityReport::worst_identity_residual() const {
    return std::max({gradient_on_sphere_primal, gradient_on_sphere_dual,
                     gradient_inversion_primal, gradient_inversion_dual,
                     cauchy_schwarz_violation, euler});
}

DualityReport verify_duality_suite(const MinkowskiNorm& n, int sample_count, std::uint64_t seed,
                                   const DualResolution& double_dual_res) {
    if (sample_count < 1) throw std::invalid_argument("verify_duality_suite: sample_count must be >= 1");
    const MinkowskiNorm dual = n.dual();
    std::mt19937_64 rng = make_rng(seed);

    DualityReport rep;
    rep.samples = sample_count;
    for (int i = 0; i < sample_count; ++i) {
        Vector x = random_test_point(rng, n.dim());
        Vector y = random_test_point(rng, n.dim());

        const double nx = n.value(x);
        const double n0x = dual.value(x);
        const Vector gn = n.gradient(x);
        const Vector gn0 = dual.gradient(x);

        rep.euler = std::max(rep.euler, std::abs(gn.dot(x) - nx));
        rep.gradient_on_sphere_primal = std::max(rep.gradient_on_sphere_primal,
                                                 std::abs(n.value(gn0) - 1.0));
        rep.gradient_on_sphere_dual = std::max(rep.gradient_on_sphere_dual,
                                               std::abs(dual.value(gn) - 1.0));
        rep.gradient_inversion_primal = std::max(rep.gradient_inversion_primal,
                                                 (n0x * n.gradient(gn0) - x).norm());
        rep.gradient_inversion_dual = std::max(rep.gradient_inversion_dual,
                                               (nx * dual.gradient(gn) - x).norm());
        rep.cauchy_schwarz_violation = std::max(rep.cauchy_schwarz_violation,
                                                std::abs(x.dot(y)) - nx * dual.value(y));
    }
    rep.cauchy_schwarz_violation = std::max(rep.cauchy_schwarz_violation, 0.0);

    // double dual through the variational route, on a smaller sample; the
    // report is always produced, so a stalled solver contributes its best value
    DualResolution vres = double_dual_res;
    vres.mode = DualResolution::Mode::Variational;
    const int dd_samples = std::min(sample_count, 12);
    for (int i = 0; i < dd_samples; ++i) {
        Vector x = random_test_point(rng, n.dim());
        vres.seed = derive_seed(seed, 1000 + static_cast<std::uint64_t>(i));
        double dd;
        try {
            dd = dual_value(dual, x, vres);
        } catch (const ConvergenceError& e) {
            dd = e.best_value;
        }
        rep.double_dual = std::max(rep.double_dual, std::abs(dd - n.value(x)));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Finsler Laplacian
// ---------------------------------------------------------------------------

double finsler_laplacian(const MinkowskiNorm& n, const ScalarField& u, const Vector& x, double h) {
    if (x.size() != n.dim()) throw std::invalid_argument("finsler_laplacian: dimension mismatch");
    if (!u.is_smooth_at(x))
        throw DegeneratePointError("finsler_laplacian: point excluded by the field's smoothness region");
    if (h <= 0.0) h = fd::default_step();

    const double grad_step = fd::default_step();
    auto grad_u = [&](const Vector& y) -> Vector {
        return u.has_gradient() ? u.gradient(y) : fd::gradient(u.value, y, grad_step);
    };

    if (n.value(grad_u(x)) < kOriginExclusionRadius)
        throw DegeneratePointError("finsler_laplacian: grad u vanishes at the evaluation point");

    auto flux = [&](const Vector& y) -> Vector {
        const Vector g = grad_u(y);
        const double ng = n.value(g);
        if (ng < kOriginExclusionRadius) return Vector::Zero(n.dim());
        return ng * n.gradient(g);
    };
    return fd::divergence_richardson(flux, x, h);
}

} // namespace anisogauge
