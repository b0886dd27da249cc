#include "anisogauge/gauge.hpp"

#include <cmath>
#include <stdexcept>

#include "anisogauge/rng.hpp"

namespace anisogauge {

// ---------------------------------------------------------------------------
// Point
// ---------------------------------------------------------------------------

Vector Point::flat() const {
    Vector x(dim());
    x.head(m()) = z;
    x.tail(k()) = sigma;
    return x;
}

Point Point::from_flat(const Vector& x, int m) {
    if (m < 0 || m > x.size())
        throw std::invalid_argument("Point::from_flat: split index out of range");
    return Point(x.head(m), x.tail(x.size() - m));
}

// ---------------------------------------------------------------------------
// ProductGauge
// ---------------------------------------------------------------------------

ProductGauge::ProductGauge(MinkowskiNorm phi, MinkowskiNorm psi, double alpha)
    : phi_(std::move(phi)), psi_(std::move(psi)), alpha_(alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("ProductGauge: alpha must be a positive finite real");
    q_ = m() + (alpha_ + 1.0) * k();
    if (phi_.has_closed_form_dual()) phi_dual_ = phi_.dual();
    if (psi_.has_closed_form_dual()) psi_dual_ = psi_.dual();
}

const MinkowskiNorm& ProductGauge::phi_dual() const {
    if (!phi_dual_) throw std::logic_error("ProductGauge: Phi has no closed-form dual");
    return *phi_dual_;
}

const MinkowskiNorm& ProductGauge::psi_dual() const {
    if (!psi_dual_) throw std::logic_error("ProductGauge: Psi has no closed-form dual");
    return *psi_dual_;
}

void ProductGauge::check_point(const Point& x) const {
    if (x.m() != m() || x.k() != k())
        throw std::invalid_argument("ProductGauge: point layout does not match (m, k)");
}

namespace {

inline double combine_layers(double phi_val, double psi_val, double alpha) {
    const double e = 2.0 * (alpha + 1.0);        // e^2 = 4 (alpha+1)^2
    const double a = std::pow(phi_val, e);
    const double b = e * psi_val;
    return std::pow(a + b * b, 1.0 / e);
}

} // namespace

double ProductGauge::theta(const Point& x) const {
    check_point(x);
    return combine_layers(phi_.value(x.z), psi_.value(x.sigma), alpha_);
}

double ProductGauge::theta0(const Point& x) const {
    check_point(x);
    return combine_layers(phi_dual().value(x.z), psi_dual().value(x.sigma), alpha_);
}

double ProductGauge::theta0_flat(const Vector& x) const {
    return combine_layers(phi_dual().value(x.head(m())), psi_dual().value(x.tail(k())), alpha_);
}

Point ProductGauge::dilate(double t, const Point& x) const {
    check_point(x);
    if (!(t > 0.0)) throw std::invalid_argument("dilate: t must be positive");
    return Point(t * x.z, std::pow(t, alpha_ + 1.0) * x.sigma);
}

Vector ProductGauge::rho_gradient(const Point& x) const {
    check_point(x);
    if (x.is_zero())
        throw DegeneratePointError("rho_gradient: rho is not differentiable at the origin");

    const double p0 = phi_dual().value(x.z);
    const double s0 = psi_dual().value(x.sigma);
    const double rho = combine_layers(p0, s0, alpha_);
    const double rho_pow = std::pow(rho, -2.0 * alpha_ - 1.0);

    // blocks inside the layer exclusion ball take their continuous extension 0
    // (the prefactors Phi0^(2a+1), Psi0 vanish in the limit)
    Vector grad = Vector::Zero(dim());
    if (p0 > kOriginExclusionRadius)
        grad.head(m()) = std::pow(p0, 2.0 * alpha_ + 1.0) * rho_pow * phi_dual().gradient(x.z);
    if (s0 > kOriginExclusionRadius)
        grad.tail(k()) = 4.0 * (alpha_ + 1.0) * s0 * rho_pow * psi_dual().gradient(x.sigma);
    return grad;
}

double ProductGauge::eikonal_residual(const Point& x) const {
    check_point(x);
    const Vector grad = rho_gradient(x);
    const double p0 = phi_dual().value(x.z);
    const double rho = theta0(x);

    const double phi_part = phi_.value(grad.head(m()));
    const double psi_part = psi_.value(grad.tail(k()));
    const double distortion = std::pow(p0 / rho, 2.0 * alpha_);
    return phi_part * phi_part +
           0.25 * std::pow(p0, 2.0 * alpha_) * psi_part * psi_part - distortion;
}

// ---------------------------------------------------------------------------
// variational Legendre transform
// ---------------------------------------------------------------------------

void VariationalConfig::validate() const {
    if (multistarts < 1) throw std::invalid_argument("VariationalConfig: multistarts must be >= 1");
    if (!(tolerance > 0.0)) throw std::invalid_argument("VariationalConfig: tolerance must be positive");
    if (max_iterations < 1) throw std::invalid_argument("VariationalConfig: max_iterations must be >= 1");
}

namespace {

struct ConstrainedPoint {
    Vector xi;
    Vector tau;
};

// Rescale along the dilation flow so that Theta(xi, tau) = 1.
bool project_to_surface(const ProductGauge& g, ConstrainedPoint& p) {
    const double c = g.theta(Point(p.xi, p.tau));
    if (!(c > 1e-300) || !std::isfinite(c)) return false;
    p.xi /= c;
    p.tau /= std::pow(c, g.alpha() + 1.0);
    return true;
}

double objective(const ProductGauge& g, const Point& x, const ConstrainedPoint& p) {
    const double a1 = g.alpha() + 1.0;
    const double inner_z = x.z.size() > 0 ? x.z.dot(p.xi) : 0.0;
    const double inner_s = x.sigma.size() > 0 ? x.sigma.dot(p.tau) : 0.0;
    return std::pow(std::abs(inner_z), a1) + 4.0 * a1 * a1 * inner_s;
}

struct AscentResult {
    double value = -std::numeric_limits<double>::infinity();
    bool converged = false;
};

AscentResult surface_ascent(const ProductGauge& g, const Point& x, ConstrainedPoint p,
                            const VariationalConfig& cfg) {
    AscentResult res;
    if (!project_to_surface(g, p)) return res;

    const double a1 = g.alpha() + 1.0;
    double obj = objective(g, x, p);
    double step = 1.0;
    Vector trial_xi(g.m()), trial_tau(g.k());

    // gradient of the constraint level function Phi^(2(a+1)) + 4(a+1)^2 Psi^2;
    // blocks with a vanished layer take their continuous extension 0
    auto constraint_normal = [&](const ConstrainedPoint& q) {
        Vector n(g.dim());
        const double phi_val = g.phi().value(q.xi);
        const double psi_val = g.psi().value(q.tau);
        n.head(g.m()) = phi_val > kOriginExclusionRadius
                            ? (2.0 * a1 * std::pow(phi_val, 2.0 * a1 - 1.0) *
                               g.phi().gradient(q.xi))
                                  .eval()
                            : Vector::Zero(g.m());
        n.tail(g.k()) = psi_val > kOriginExclusionRadius
                            ? (8.0 * a1 * a1 * psi_val * g.psi().gradient(q.tau)).eval()
                            : Vector::Zero(g.k());
        return n;
    };

    for (int it = 0; it < cfg.max_iterations; ++it) {
        const double inner_z = x.z.dot(p.xi);
        Vector gz = a1 * std::pow(std::abs(inner_z), g.alpha()) *
                    (inner_z >= 0.0 ? 1.0 : -1.0) * x.z;
        Vector gs = 4.0 * a1 * a1 * x.sigma;
        double gnorm2 = gz.squaredNorm() + gs.squaredNorm();
        if (gnorm2 < 1e-28) { res.converged = true; break; }

        // tangential part of the gradient: stationarity on the surface means
        // the objective gradient is parallel to the constraint normal
        const Vector normal = constraint_normal(p);
        const double n2 = normal.squaredNorm();
        if (n2 > 0.0) {
            Vector grad(g.dim());
            grad.head(g.m()) = gz;
            grad.tail(g.k()) = gs;
            grad -= (grad.dot(normal) / n2) * normal;
            gz = grad.head(g.m());
            gs = grad.tail(g.k());
            const double tan2 = grad.squaredNorm();
            if (tan2 <= cfg.tolerance * std::max(1.0, gnorm2)) {
                res.converged = true;
                break;
            }
            gnorm2 = tan2;
        }

        // projected objective along the direction, on preallocated buffers
        auto probe = [&](double t) {
            trial_xi = p.xi + t * gz;
            trial_tau = p.tau + t * gs;
            const double phi_val = g.phi().value(trial_xi);
            const double psi_val = g.psi().value(trial_tau);
            const double c = std::pow(std::pow(phi_val, 2.0 * a1) +
                                          4.0 * a1 * a1 * psi_val * psi_val,
                                      1.0 / (2.0 * a1));
            if (!(c > 1e-300) || !std::isfinite(c))
                return -std::numeric_limits<double>::infinity();
            const double iz = x.z.dot(trial_xi) / c;
            const double is = x.sigma.dot(trial_tau) / std::pow(c, a1);
            return std::pow(std::abs(iz), a1) + 4.0 * a1 * a1 * is;
        };

        double t = step;
        bool accepted = false;
        for (int bt = 0; bt < 50; ++bt) {
            if (probe(t) > obj + 1e-4 * t * gnorm2) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) { res.converged = true; break; }

        // golden-section refinement along the direction; a bare Armijo step
        // crawls on strongly anisotropic constraint surfaces
        constexpr double kInvPhi = 0.6180339887498949;
        double a = 0.0, b = 2.0 * t;
        double c1 = b - kInvPhi * b, c2 = kInvPhi * b;
        double f1 = probe(c1), f2 = probe(c2);
        for (int r = 0; r < 30; ++r) {
            if (f1 > f2) {
                b = c2; c2 = c1; f2 = f1;
                c1 = b - kInvPhi * (b - a);
                f1 = probe(c1);
            } else {
                a = c1; c1 = c2; f1 = f2;
                c2 = a + kInvPhi * (b - a);
                f2 = probe(c2);
            }
        }
        double t_best = 0.5 * (a + b);
        if (probe(t) >= probe(t_best)) t_best = t;
        ConstrainedPoint next{p.xi + t_best * gz, p.tau + t_best * gs};
        project_to_surface(g, next);
        const double next_obj = objective(g, x, next);
        if (next_obj <= obj) { res.converged = true; break; }
        const double gain = next_obj - obj;
        p = std::move(next);
        obj = next_obj;
        step = std::clamp(t_best * 2.0, 1e-9, 1e9);
        if (gain <= cfg.tolerance * std::max(1.0, std::abs(obj))) {
            res.converged = true;
            break;
        }
    }
    res.value = obj;
    return res;
}

} // namespace

double theta0_variational(const ProductGauge& g, const Point& x, const VariationalConfig& cfg) {
    cfg.validate();
    g.check_point(x);
    if (x.is_zero())
        throw std::invalid_argument("theta0_variational: x must be nonzero");

    const double a1 = g.alpha() + 1.0;
    const int m = g.m();
    const int k = g.k();

    // Lagrange-system candidate: xi along grad Phi0(z) at layer level s*,
    // tau along grad Psi0(sigma) at the complementary level.
    std::vector<ConstrainedPoint> seeds;
    {
        const double p0 = g.has_closed_form_duals() && x.z.norm() > kOriginExclusionRadius ? g.phi_dual().value(x.z) : 0.0;
        const double s0 = g.has_closed_form_duals() && x.sigma.norm() > kOriginExclusionRadius ? g.psi_dual().value(x.sigma) : 0.0;
        Vector xi_dir = p0 > 0.0 ? g.phi_dual().gradient(x.z).eval() : Vector::Zero(m);
        Vector tau_dir = s0 > 0.0 ? g.psi_dual().gradient(x.sigma).eval() : Vector::Zero(k);
        const double a_obj = std::pow(p0, a1);
        const double b_obj = 2.0 * a1 * s0;
        const double denom = std::hypot(a_obj, b_obj);
        if (denom > 0.0) {
            const double u_star = a_obj / denom;                   // = s*^(a+1)
            const double s_star = std::pow(u_star, 1.0 / a1);
            const double w_star = std::sqrt(std::max(0.0, 1.0 - u_star * u_star)) / (2.0 * a1);
            seeds.push_back({s_star * xi_dir, w_star * tau_dir});
            seeds.push_back({-s_star * xi_dir, w_star * tau_dir});
        }
        if (p0 > 0.0) seeds.push_back({xi_dir, Vector::Zero(k)});
        if (s0 > 0.0) seeds.push_back({Vector::Zero(m), tau_dir / (2.0 * a1)});
    }
    for (int i = 0; i < m && static_cast<int>(seeds.size()) < cfg.multistarts; ++i)
        seeds.push_back({Vector::Unit(m, i), Vector::Zero(k)});
    std::mt19937_64 rng = make_rng(cfg.seed);
    while (static_cast<int>(seeds.size()) < cfg.multistarts)
        seeds.push_back({random_direction(rng, m), 0.5 * random_direction(rng, k)});

    double best = -std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (auto& seed : seeds) {
        AscentResult r = surface_ascent(g, x, std::move(seed), cfg);
        best = std::max(best, r.value);
        any_converged = any_converged || r.converged;
    }

    if (!std::isfinite(best) || best < 0.0)
        throw ConvergenceError("theta0_variational: no feasible start", best, cfg.max_iterations);
    const double value = std::pow(best, 1.0 / a1);
    if (!any_converged)
        throw ConvergenceError("theta0_variational: iteration limit reached", value,
                               cfg.max_iterations);
    return value;
}

} // namespace anisogauge
