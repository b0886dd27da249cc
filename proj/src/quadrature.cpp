#include "anisogauge/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <thread>

#include "anisogauge/rng.hpp"

namespace anisogauge {

// ---------------------------------------------------------------------------
// config / region plumbing
// ---------------------------------------------------------------------------

void QuadratureConfig::validate() const {
    if (budget < 1000) throw std::invalid_argument("QuadratureConfig: budget must be >= 1000");
    if (!(target_rel_error > 0.0) || target_rel_error > 0.1)
        throw std::invalid_argument("QuadratureConfig: target_rel_error must lie in (0, 0.1]");
    if (stratification_depth < 0 || stratification_depth > 12)
        throw std::invalid_argument("QuadratureConfig: stratification_depth must lie in [0, 12]");
}

std::string QuadratureConfig::method_name() const {
    switch (method) {
        case Method::TensorGauss: return "tensor-gauss";
        case Method::Adaptive: return "adaptive";
        case Method::MonteCarlo: return "monte-carlo";
        case Method::QuasiMonteCarlo: return "quasi-monte-carlo";
    }
    return "?";
}

QuadratureConfig::Method QuadratureConfig::parse_method(const std::string& name) {
    if (name == "tensor-gauss") return Method::TensorGauss;
    if (name == "adaptive") return Method::Adaptive;
    if (name == "monte-carlo" || name == "mc") return Method::MonteCarlo;
    if (name == "quasi-monte-carlo" || name == "qmc") return Method::QuasiMonteCarlo;
    throw std::invalid_argument("unknown quadrature method '" + name + "'");
}

Region Region::gauge_ball(double r) {
    Region reg;
    reg.kind = Kind::GaugeBall;
    reg.r_outer = r;
    reg.validate();
    return reg;
}

Region Region::gauge_shell(double r0, double r1) {
    Region reg;
    reg.kind = Kind::GaugeShell;
    reg.r_inner = r0;
    reg.r_outer = r1;
    reg.validate();
    return reg;
}

Region Region::box_minus_ball(Vector lo, Vector hi, double excision) {
    Region reg;
    reg.kind = Kind::BoxMinusBall;
    reg.box_lo = std::move(lo);
    reg.box_hi = std::move(hi);
    reg.r_inner = excision;
    reg.r_outer = std::numeric_limits<double>::infinity();
    reg.validate();
    return reg;
}

Region Region::with_sigma_offset(Vector offset) const {
    Region reg = *this;
    reg.sigma_offset = std::move(offset);
    return reg;
}

void Region::validate() const {
    switch (kind) {
        case Kind::GaugeBall:
            if (!(r_outer > 0.0)) throw std::invalid_argument("Region: ball radius must be positive");
            break;
        case Kind::GaugeShell:
            if (!(r_inner > 0.0) || !(r_outer > r_inner))
                throw std::invalid_argument("Region: shell radii must be positive and ordered");
            break;
        case Kind::BoxMinusBall:
            if (box_lo.size() == 0 || box_lo.size() != box_hi.size())
                throw std::invalid_argument("Region: box bounds must be nonempty and consistent");
            if (((box_hi - box_lo).array() <= 0.0).any())
                throw std::invalid_argument("Region: box must have positive extent");
            if (r_inner < 0.0) throw std::invalid_argument("Region: excision radius must be >= 0");
            break;
    }
}

int quadrature_threads() {
    if (const char* env = std::getenv("ANISOGAUGE_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return std::min(n, 64);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return std::clamp<int>(static_cast<int>(hc), 1, 8);
}

namespace {

constexpr int kTaskCount = 64;   // fixed so results are thread-count independent

// Geometry of a region resolved against a gauge, in coordinates centered at
// the (possibly sigma-shifted) pole.
struct Frame {
    const ProductGauge* g;
    const Region* region;
    Vector offset;      // flat; zero when the region has no sigma shift
    Vector half;        // centered sampling box half-widths
    Vector lo, hi;      // centered box bounds
    double volume;
    int dim;

    double rho(const Vector& w) const { return g->theta0_flat(w); }

    bool inside(double r) const {
        switch (region->kind) {
            case Region::Kind::GaugeBall: return r < region->r_outer;
            case Region::Kind::GaugeShell: return r > region->r_inner && r < region->r_outer;
            case Region::Kind::BoxMinusBall: return r > region->r_inner;
        }
        return false;
    }

    // Samplers re-radialize accepted points into the region along the dilation
    // flow, so gauge shells accept on the whole outer ball (much higher
    // acceptance for thin shells) and carry the exact radial mass ratio.
    bool accept_raw(double r) const {
        if (region->kind == Region::Kind::GaugeShell) return r < region->r_outer;
        return inside(r);
    }

    double radial_mass_factor() const {
        if (region->kind != Region::Kind::GaugeShell) return 1.0;
        const double q = g->homogeneous_dimension();
        return 1.0 - std::pow(region->r_inner / region->r_outer, q);
    }

    // dilation along the anisotropic flow, in centered coordinates
    void dilate_in_place(Vector& w, double s) const {
        w.head(g->m()) *= s;
        w.tail(g->k()) *= std::pow(s, g->alpha() + 1.0);
    }

    bool radializable() const { return region->kind != Region::Kind::BoxMinusBall; }

    // inverse CDF of the radial law t^(Q-1) dt restricted to the region's radii
    double radial_icdf(double v) const {
        const double q = g->homogeneous_dimension();
        const double r0 = radializable() ? region->r_inner : 0.0;
        const double r1 = region->r_outer;
        const double a = std::pow(r0, q);
        const double b = std::pow(r1, q);
        return std::pow(a + v * (b - a), 1.0 / q);
    }
};

Frame make_frame(const Region& region, const ProductGauge& g) {
    region.validate();
    Frame fr;
    fr.g = &g;
    fr.region = &region;
    fr.dim = g.dim();

    fr.offset = Vector::Zero(fr.dim);
    if (region.sigma_offset.size() != 0) {
        if (region.sigma_offset.size() != g.k())
            throw std::invalid_argument("Region: sigma offset has wrong dimension");
        fr.offset.tail(g.k()) = region.sigma_offset;
    }

    if (region.kind == Region::Kind::BoxMinusBall) {
        if (region.box_lo.size() != fr.dim)
            throw std::invalid_argument("Region: box dimension does not match the gauge");
        fr.lo = region.box_lo - fr.offset;
        fr.hi = region.box_hi - fr.offset;
    } else {
        // rho < r forces Phi0(z) < r and Psi0(sigma) < r^(a+1)/(2(a+1));
        // the equivalence constants of the duals turn that into a box
        const double b_phi = g.phi().equivalence_bounds().second;   // Phi0 >= |.| / b_phi
        const double b_psi = g.psi().equivalence_bounds().second;
        const double a1 = g.alpha() + 1.0;
        const double r = region.r_outer;
        fr.half = Vector(fr.dim);
        fr.half.head(g.m()).setConstant(r * b_phi);
        fr.half.tail(g.k()).setConstant(b_psi * std::pow(r, a1) / (2.0 * a1));
        fr.lo = -fr.half;
        fr.hi = fr.half;
    }
    fr.volume = (fr.hi - fr.lo).prod();
    return fr;
}

// ---------------------------------------------------------------------------
// Monte Carlo / quasi-Monte Carlo
// ---------------------------------------------------------------------------

struct TaskStats {
    std::int64_t raw = 0;
    std::int64_t accepted = 0;
    std::int64_t blocks = 0;
    double block_sum = 0.0;
    double block_sumsq = 0.0;
    double plain_fsum = 0.0;   // QMC replicate path
};

constexpr int kHaltonPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

double radical_inverse(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

template <typename NextUniform>
void run_sampling_task(const Frame& fr, const std::function<double(const Vector&)>& f,
                       std::int64_t samples, int strata, NextUniform&& next_uniform,
                       bool replicate_mode, TaskStats& stats) {
    const int dim = fr.dim;
    Vector w(dim), x(dim);
    double current_sum = 0.0;
    int current_count = 0;

    for (std::int64_t i = 0; i < samples; ++i) {
        ++stats.raw;
        for (int d = 0; d < dim; ++d) {
            const double u = next_uniform(d);
            w[d] = fr.lo[d] + u * (fr.hi[d] - fr.lo[d]);
        }
        const double r = fr.rho(w);
        const double v = next_uniform(dim);   // radial redraw coordinate
        if (!fr.accept_raw(r) || !(r > 0.0)) continue;
        ++stats.accepted;

        if (fr.radializable()) {
            const double vs = replicate_mode
                                  ? v
                                  : (static_cast<double>(current_count) + v) / strata;
            const double t = fr.radial_icdf(vs);
            x = w;
            fr.dilate_in_place(x, t / r);
            x += fr.offset;
        } else {
            x = w + fr.offset;
        }
        const double val = f(x);

        if (replicate_mode) {
            stats.plain_fsum += val;
        } else {
            current_sum += val;
            if (++current_count == strata) {
                const double bm = current_sum / strata;
                ++stats.blocks;
                stats.block_sum += bm;
                stats.block_sumsq += bm * bm;
                current_sum = 0.0;
                current_count = 0;
            }
        }
    }
}

void run_tasks_parallel(int task_count, int threads, const std::function<void(int)>& run_one) {
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= task_count) break;
            run_one(t);
        }
    };
    const int extra = std::max(0, std::min(threads, task_count) - 1);
    std::vector<std::thread> pool;
    pool.reserve(extra);
    for (int i = 0; i < extra; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

IntegralEstimate integrate_monte_carlo(const std::function<double(const Vector&)>& f,
                                       const Frame& fr, const QuadratureConfig& cfg, bool qmc) {
    const int strata = fr.radializable() ? (1 << cfg.stratification_depth) : 1;
    const int dim = fr.dim;
    if (qmc && dim + 1 > static_cast<int>(std::size(kHaltonPrimes)))
        throw std::invalid_argument("quasi-monte-carlo: dimension too large for the Halton bases");

    std::vector<TaskStats> stats(kTaskCount);
    // custom layer norms may carry non-thread-safe evaluators (e.g. Python)
    const bool custom = fr.g->phi().family() == NormFamily::Custom ||
                        fr.g->psi().family() == NormFamily::Custom;
    const int threads = custom ? 1 : quadrature_threads();

    auto run_one = [&](int t) {
        const std::int64_t n = cfg.budget / kTaskCount + (t < cfg.budget % kTaskCount ? 1 : 0);
        if (qmc) {
            // Cranley-Patterson rotation: each task is an independently
            // shifted copy of the same Halton stream
            std::mt19937_64 rng = make_rng(cfg.seed, static_cast<std::uint64_t>(t));
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            std::vector<double> shift(dim + 1);
            for (auto& s : shift) s = unif(rng);
            std::uint64_t i = 64;      // skip the first points of the stream
            auto next_aligned = [&](int d) {
                double u = radical_inverse(i, kHaltonPrimes[d]) + shift[d];
                u -= std::floor(u);
                if (d == dim) ++i;     // radial coordinate is drawn last
                return u;
            };
            run_sampling_task(fr, f, n, strata, next_aligned, true, stats[t]);
        } else {
            std::mt19937_64 rng = make_rng(cfg.seed, static_cast<std::uint64_t>(t));
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            auto next = [&](int) { return unif(rng); };
            run_sampling_task(fr, f, n, strata, next, false, stats[t]);
        }
    };
    run_tasks_parallel(kTaskCount, threads, run_one);

    IntegralEstimate est;
    est.method = qmc ? "quasi-monte-carlo" : "monte-carlo";
    est.box_volume = fr.volume;

    std::int64_t raw = 0, accepted = 0;
    for (const auto& s : stats) { raw += s.raw; accepted += s.accepted; }
    est.evaluations = raw;
    est.acceptance_rate = raw > 0 ? static_cast<double>(accepted) / raw : 0.0;

    const double mass = fr.radial_mass_factor();
    if (qmc) {
        std::vector<double> replicates;
        replicates.reserve(kTaskCount);
        for (const auto& s : stats)
            if (s.raw > 0) replicates.push_back(fr.volume * mass * s.plain_fsum / s.raw);
        const double n_rep = static_cast<double>(replicates.size());
        const double mean = std::accumulate(replicates.begin(), replicates.end(), 0.0) / n_rep;
        double var = 0.0;
        for (double r : replicates) var += (r - mean) * (r - mean);
        var = n_rep > 1 ? var / (n_rep - 1.0) : 0.0;
        est.value = mean;
        est.error = std::sqrt(var / n_rep);
    } else {
        std::int64_t blocks = 0;
        double s1 = 0.0, s2 = 0.0;
        for (const auto& s : stats) { blocks += s.blocks; s1 += s.block_sum; s2 += s.block_sumsq; }
        const double p = est.acceptance_rate;
        const double se_p = raw > 0 ? std::sqrt(std::max(0.0, p * (1.0 - p) / raw)) : 0.0;
        if (blocks == 0) {
            est.value = 0.0;
            est.error = fr.volume * se_p;
            est.budget_exhausted = true;
            return est;
        }
        const double fbar = s1 / blocks;
        double varf = s2 / blocks - fbar * fbar;
        varf = blocks > 1 ? std::max(0.0, varf) * blocks / (blocks - 1.0) : 0.0;
        const double se_f = std::sqrt(varf / blocks);
        est.value = fr.volume * mass * p * fbar;
        est.error = fr.volume * mass * std::hypot(se_p * fbar, p * se_f);
    }
    est.budget_exhausted = est.error > cfg.target_rel_error * std::abs(est.value);
    return est;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rules
// ---------------------------------------------------------------------------

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

// Tensor Gauss-Legendre over the frame box of f * indicator; the error bound
// compares against the rule with half the points per dimension.
IntegralEstimate integrate_tensor_gauss(const std::function<double(const Vector&)>& f,
                                        const Frame& fr, const QuadratureConfig& cfg) {
    const int dim = fr.dim;
    if (dim > 4)
        throw std::invalid_argument("tensor-gauss: supported for dimension <= 4; use monte-carlo");

    auto run_rule = [&](int n1d, std::int64_t& evals) {
        std::vector<double> nodes, weights;
        gauss_legendre(n1d, nodes, weights);
        Vector w(dim);
        std::vector<int> idx(dim, 0);
        double total = 0.0;
        for (;;) {
            double weight = 1.0;
            for (int d = 0; d < dim; ++d) {
                const double half = 0.5 * (fr.hi[d] - fr.lo[d]);
                w[d] = fr.lo[d] + half * (nodes[idx[d]] + 1.0);
                weight *= half * weights[idx[d]];
            }
            ++evals;
            const double r = fr.rho(w);
            if (fr.inside(r)) total += weight * f((w + fr.offset).eval());
            int d = 0;
            while (d < dim && ++idx[d] == n1d) idx[d++] = 0;
            if (d == dim) break;
        }
        return total;
    };

    const std::int64_t per_point_budget = cfg.budget;
    int n1d = static_cast<int>(std::floor(std::pow(static_cast<double>(per_point_budget) * 0.9,
                                                   1.0 / dim)));
    n1d = std::clamp(n1d, 4, 256);

    IntegralEstimate est;
    est.method = "tensor-gauss";
    est.box_volume = fr.volume;
    std::int64_t evals = 0;
    const double coarse = run_rule(std::max(2, n1d / 2), evals);
    const double fine = run_rule(n1d, evals);
    est.value = fine;
    est.error = std::abs(fine - coarse);
    est.evaluations = evals;
    est.budget_exhausted = est.error > cfg.target_rel_error * std::abs(est.value);
    return est;
}

// ---------------------------------------------------------------------------
// adaptive cubature
// ---------------------------------------------------------------------------

struct Cell {
    Vector lo, hi;
    double value = 0.0;   // finer rule
    double error = 0.0;
};

struct CellOrder {
    bool operator()(const Cell& a, const Cell& b) const { return a.error < b.error; }
};

// Adaptive subdivision with an embedded tensor GL3/GL5 pair. `eval` integrates
// nothing itself: it is called with cell bounds and a 1-D rule size and must
// return the tensor-rule value of the (indicator-masked) integrand.
IntegralEstimate adaptive_refine(
    const std::function<double(const Vector&, const Vector&, int, std::int64_t&)>& rule,
    Vector lo, Vector hi, const QuadratureConfig& cfg) {
    std::int64_t evals = 0;
    auto make_cell = [&](Vector clo, Vector chi) {
        Cell c;
        c.lo = std::move(clo);
        c.hi = std::move(chi);
        const double coarse = rule(c.lo, c.hi, 3, evals);
        c.value = rule(c.lo, c.hi, 5, evals);
        c.error = std::abs(c.value - coarse);
        return c;
    };

    std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap;
    heap.push(make_cell(std::move(lo), std::move(hi)));
    double total = heap.top().value;
    double total_err = heap.top().error;

    while (evals < cfg.budget && total_err > cfg.target_rel_error * std::abs(total) &&
           heap.size() < 2'000'000) {
        Cell worst = heap.top();
        heap.pop();
        total -= worst.value;
        total_err -= worst.error;

        int split = 0;
        (worst.hi - worst.lo).maxCoeff(&split);
        const double mid = 0.5 * (worst.lo[split] + worst.hi[split]);
        Vector hi_left = worst.hi;
        hi_left[split] = mid;
        Vector lo_right = worst.lo;
        lo_right[split] = mid;

        Cell left = make_cell(worst.lo, std::move(hi_left));
        Cell right = make_cell(std::move(lo_right), worst.hi);
        total += left.value + right.value;
        total_err += left.error + right.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
    }

    IntegralEstimate est;
    est.method = "adaptive";
    est.value = total;
    est.error = total_err;
    est.evaluations = evals;
    est.budget_exhausted = total_err > cfg.target_rel_error * std::abs(total);
    return est;
}

IntegralEstimate integrate_adaptive(const std::function<double(const Vector&)>& f, const Frame& fr,
                                    const QuadratureConfig& cfg) {
    if (fr.dim > 4)
        throw std::invalid_argument("adaptive: supported for dimension <= 4; use monte-carlo");

    const ProductGauge& g = *fr.g;
    const bool column_reduced = fr.radializable() && g.k() == 1;

    if (!column_reduced) {
        auto rule = [&](const Vector& lo, const Vector& hi, int n1d, std::int64_t& evals) {
            std::vector<double> nodes, weights;
            gauss_legendre(n1d, nodes, weights);
            const int dim = fr.dim;
            Vector w(dim);
            std::vector<int> idx(dim, 0);
            double total = 0.0;
            for (;;) {
                double weight = 1.0;
                for (int d = 0; d < dim; ++d) {
                    const double half = 0.5 * (hi[d] - lo[d]);
                    w[d] = lo[d] + half * (nodes[idx[d]] + 1.0);
                    weight *= half * weights[idx[d]];
                }
                ++evals;
                if (fr.inside(fr.rho(w))) total += weight * f((w + fr.offset).eval());
                int d = 0;
                while (d < dim && ++idx[d] == n1d) idx[d++] = 0;
                if (d == dim) break;
            }
            return total;
        };
        IntegralEstimate est = adaptive_refine(rule, fr.lo, fr.hi, cfg);
        est.box_volume = fr.volume;
        return est;
    }

    // k = 1: the sigma-section of a gauge ball/shell is an exact interval, so
    // integrate sigma analytically-bounded Gauss-Legendre inside an adaptive
    // refinement over the z box only. Removes the indicator discontinuity.
    const double a1 = g.alpha() + 1.0;
    const double e = 2.0 * a1;
    const double psi0_unit = g.psi_dual().value(Vector::Ones(1));
    const double r0 = fr.region->kind == Region::Kind::GaugeShell ? fr.region->r_inner : 0.0;
    const double r1 = fr.region->r_outer;
    const double sig_off = fr.offset[g.m()];

    std::vector<double> inner_nodes, inner_weights;
    gauss_legendre(24, inner_nodes, inner_weights);

    auto sigma_limit = [&](double pz, double r) {
        const double d = std::pow(r, e) - std::pow(pz, e);
        return d <= 0.0 ? 0.0 : std::sqrt(d) / (2.0 * a1 * psi0_unit);
    };

    auto rule = [&](const Vector& lo, const Vector& hi, int n1d, std::int64_t& evals) {
        std::vector<double> nodes, weights;
        gauss_legendre(n1d, nodes, weights);
        const int m = g.m();
        Vector x(m + 1);
        Vector z(m);
        std::vector<int> idx(m, 0);
        double total = 0.0;
        for (;;) {
            double weight = 1.0;
            for (int d = 0; d < m; ++d) {
                const double half = 0.5 * (hi[d] - lo[d]);
                z[d] = lo[d] + half * (nodes[idx[d]] + 1.0);
                weight *= half * weights[idx[d]];
            }
            const double pz = g.phi_dual().value(z);
            const double l_outer = sigma_limit(pz, r1);
            const double l_inner = r0 > 0.0 ? sigma_limit(pz, r0) : 0.0;
            double inner_total = 0.0;
            std::vector<std::pair<double, double>> intervals;
            if (l_outer > 0.0) {
                if (l_inner > 0.0) {
                    intervals.emplace_back(l_inner, l_outer);
                    intervals.emplace_back(-l_outer, -l_inner);
                } else if (pz >= r0) {
                    intervals.emplace_back(-l_outer, l_outer);
                }
            }
            x.head(m) = z;
            for (auto [s_lo, s_hi] : intervals) {
                const double half = 0.5 * (s_hi - s_lo);
                for (int i = 0; i < static_cast<int>(inner_nodes.size()); ++i) {
                    x[m] = s_lo + half * (inner_nodes[i] + 1.0) + sig_off;
                    ++evals;
                    inner_total += half * inner_weights[i] * f(x);
                }
            }
            total += weight * inner_total;
            int d = 0;
            while (d < m && ++idx[d] == n1d) idx[d++] = 0;
            if (d == m) break;
        }
        return total;
    };

    IntegralEstimate est = adaptive_refine(rule, fr.lo.head(g.m()), fr.hi.head(g.m()), cfg);
    est.box_volume = fr.volume;
    return est;
}

} // namespace

// ---------------------------------------------------------------------------
// entry points
// ---------------------------------------------------------------------------

IntegralEstimate integrate(const std::function<double(const Vector&)>& f, const Region& region,
                           const ProductGauge& g, const QuadratureConfig& cfg) {
    cfg.validate();
    const Frame fr = make_frame(region, g);
    switch (cfg.method) {
        case QuadratureConfig::Method::MonteCarlo:
            return integrate_monte_carlo(f, fr, cfg, false);
        case QuadratureConfig::Method::QuasiMonteCarlo:
            return integrate_monte_carlo(f, fr, cfg, true);
        case QuadratureConfig::Method::TensorGauss:
            return integrate_tensor_gauss(f, fr, cfg);
        case QuadratureConfig::Method::Adaptive:
            return integrate_adaptive(f, fr, cfg);
    }
    throw std::logic_error("integrate: unknown method");
}

ShellEstimate shell_surface_estimate(const std::function<double(const Vector&)>& f,
                                     const ProductGauge& g, const std::vector<double>& deltas,
                                     const QuadratureConfig& cfg) {
    cfg.validate();
    if (deltas.size() < 2)
        throw std::invalid_argument("shell_surface_estimate: need at least two shell widths");

    ShellEstimate out;
    out.deltas = deltas;
    std::sort(out.deltas.begin(), out.deltas.end(), std::greater<double>());
    for (double d : out.deltas)
        if (!(d > 0.0)) throw std::invalid_argument("shell_surface_estimate: widths must be positive");

    QuadratureConfig sub = cfg;
    sub.budget = std::max<std::int64_t>(1000, cfg.budget / static_cast<std::int64_t>(deltas.size()));

    for (std::size_t i = 0; i < out.deltas.size(); ++i) {
        const double d = out.deltas[i];
        sub.seed = derive_seed(cfg.seed, 7000 + i);
        const IntegralEstimate est = integrate(f, Region::gauge_shell(1.0, 1.0 + d), g, sub);
        out.shell_values.push_back(est.value / d);
        out.shell_errors.push_back(est.error / d);
        out.budget_exhausted = out.budget_exhausted || est.budget_exhausted;
    }

    // Neville extrapolation of (delta, S(delta)) to delta = 0
    const int n = static_cast<int>(out.deltas.size());
    double value = 0.0, err_quad_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double w = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i) w *= out.deltas[j] / (out.deltas[j] - out.deltas[i]);
        value += w * out.shell_values[i];
        err_quad_sq += w * w * out.shell_errors[i] * out.shell_errors[i];
    }
    // model error: full polynomial vs linear extrapolation from the two
    // finest widths
    const double d1 = out.deltas[n - 2], d2 = out.deltas[n - 1];
    const double s1 = out.shell_values[n - 2], s2 = out.shell_values[n - 1];
    const double linear = s2 - d2 * (s1 - s2) / (d1 - d2);
    out.value = value;
    out.error = std::sqrt(err_quad_sq) + std::abs(value - linear);

    for (int i = 0; i + 2 < n; ++i) {
        const double a = out.shell_values[i] - out.shell_values[i + 1];
        const double b = out.shell_values[i + 1] - out.shell_values[i + 2];
        if (a * b < 0.0) out.monotone = false;
    }
    return out;
}

} // namespace anisogauge
