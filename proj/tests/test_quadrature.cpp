#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "anisogauge/quadrature.hpp"
#include "anisogauge/rng.hpp"

using namespace anisogauge;

namespace {

ProductGauge euclidean_gauge(double alpha) {
    return ProductGauge(MinkowskiNorm::euclidean(2), MinkowskiNorm::euclidean(1), alpha);
}

// volume of the alpha = 1 dual-gauge unit ball {(|z|^4 + 16 s^2)^(1/4) < 1}
// in R^2 x R: the sigma section at |z| = r has length sqrt(1 - r^4)/2, so the
// volume reduces to pi * int_0^1 r sqrt(1 - r^4) dr = pi^2 / 8
constexpr double kBallVolumeFixture = 1.2337005501361697;

double ball_volume_reduction_oracle() {
    // 1-D Gauss-Legendre of the reduced integral, independent of the engine
    const int n = 200000;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = (i + 0.5) / n;
        total += r * std::sqrt(1.0 - r * r * r * r) / n;
    }
    return M_PI * total;
}

const auto one = [](const Vector&) { return 1.0; };

} // namespace

TEST_CASE("config and region validation") {
    QuadratureConfig cfg;
    cfg.budget = 10;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.budget = 10000;
    cfg.target_rel_error = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.target_rel_error = 1e-3;
    CHECK_NOTHROW(cfg.validate());

    CHECK_THROWS_AS(Region::gauge_ball(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(Region::gauge_shell(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(QuadratureConfig::parse_method("trapezoid"), std::invalid_argument);
    CHECK(QuadratureConfig::parse_method("qmc") == QuadratureConfig::Method::QuasiMonteCarlo);
}

TEST_CASE("unit-ball volume fixture across all four methods") {
    CHECK(std::abs(ball_volume_reduction_oracle() - kBallVolumeFixture) <= 1e-6);

    const ProductGauge g = euclidean_gauge(1.0);
    for (auto method :
         {QuadratureConfig::Method::MonteCarlo, QuadratureConfig::Method::QuasiMonteCarlo,
          QuadratureConfig::Method::Adaptive, QuadratureConfig::Method::TensorGauss}) {
        QuadratureConfig cfg;
        cfg.method = method;
        cfg.budget = 1'000'000;
        cfg.seed = 7;
        const IntegralEstimate est = integrate(one, Region::gauge_ball(1.0), g, cfg);
        INFO(cfg.method_name());
        CHECK(std::abs(est.value - kBallVolumeFixture) <= std::max(3.0 * est.error, 2e-3));
    }
}

TEST_CASE("alpha -> 0 ball volume approaches the ellipsoid value") {
    const ProductGauge g = euclidean_gauge(1e-6);
    QuadratureConfig cfg;
    cfg.budget = 2'000'000;
    cfg.seed = 3;
    const IntegralEstimate est = integrate(one, Region::gauge_ball(1.0), g, cfg);
    CHECK(std::abs(est.value - 2.0943951023931953) <= 3.0 * est.error);
    CHECK(est.error <= 2e-3);
}

TEST_CASE("linearity of the estimates under fixed seed") {
    const ProductGauge g = euclidean_gauge(1.0);
    QuadratureConfig cfg;
    cfg.budget = 400'000;
    cfg.seed = 5;
    auto f1 = [&](const Vector& x) { return x.squaredNorm(); };
    auto f2 = [&](const Vector& x) { return std::cos(x[0]); };
    auto combo = [&](const Vector& x) { return 2.0 * f1(x) - 3.0 * f2(x); };
    const Region ball = Region::gauge_ball(1.0);
    const double lhs = integrate(combo, ball, g, cfg).value;
    const double rhs = 2.0 * integrate(f1, ball, g, cfg).value -
                       3.0 * integrate(f2, ball, g, cfg).value;
    // same seed, same sample stream: linearity holds to roundoff
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("Monte Carlo estimates are unbiased across independent seeds") {
    const ProductGauge g = euclidean_gauge(1.0);
    QuadratureConfig cfg;
    cfg.budget = 100'000;
    double sum = 0.0, sumsq = 0.0;
    const int seeds = 30;
    for (int s = 0; s < seeds; ++s) {
        cfg.seed = 1000 + s;
        const double v = integrate(one, Region::gauge_ball(1.0), g, cfg).value;
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / seeds;
    const double sd = std::sqrt(std::max(0.0, sumsq / seeds - mean * mean) * seeds / (seeds - 1.0));
    const double sem = sd / std::sqrt(static_cast<double>(seeds));
    CHECK(std::abs(mean - kBallVolumeFixture) <= 3.0 * sem);
}

TEST_CASE("determinism: identical config and seed give identical bits") {
    const ProductGauge g = euclidean_gauge(1.0);
    QuadratureConfig cfg;
    cfg.budget = 200'000;
    cfg.seed = 9;
    const double a = integrate(one, Region::gauge_ball(1.0), g, cfg).value;
    const double b = integrate(one, Region::gauge_ball(1.0), g, cfg).value;
    CHECK(a == b);

    // thread count must not change the reduction
    setenv("ANISOGAUGE_THREADS", "1", 1);
    const double t1 = integrate(one, Region::gauge_ball(1.0), g, cfg).value;
    setenv("ANISOGAUGE_THREADS", "3", 1);
    const double t3 = integrate(one, Region::gauge_ball(1.0), g, cfg).value;
    unsetenv("ANISOGAUGE_THREADS");
    CHECK(t1 == a);
    CHECK(t3 == a);
}

TEST_CASE("rejection acceptance matches the ball-to-box ratio") {
    const ProductGauge g = euclidean_gauge(1.0);
    QuadratureConfig cfg;
    cfg.budget = 400'000;
    cfg.seed = 13;
    const IntegralEstimate est = integrate(one, Region::gauge_ball(1.0), g, cfg);
    // box from exact equivalence constants: z in [-1,1]^2, sigma in [-1/4,1/4]
    CHECK(est.box_volume == doctest::Approx(2.0));
    const double expected = kBallVolumeFixture / est.box_volume;
    CHECK(est.acceptance_rate >= 0.95 * expected);
    CHECK(est.acceptance_rate <= 1.05 * expected);
}

TEST_CASE("thin-shell surface functional: coarea value in the near-isotropic limit") {
    const ProductGauge g = euclidean_gauge(1e-6);
    QuadratureConfig cfg;
    cfg.budget = 3'000'000;
    cfg.seed = 4;
    const ShellEstimate sh = shell_surface_estimate(one, g, {0.02, 0.01, 0.005}, cfg);
    // Q * ellipsoid volume = 3 * (2 pi / 3) = 2 pi
    CHECK(std::abs(sh.value - 2.0 * M_PI) <= 3.0 * sh.error);
    CHECK(sh.error <= 0.05);
    CHECK(sh.monotone);
    CHECK(sh.shell_values.size() == 3);

    CHECK_THROWS_AS(shell_surface_estimate(one, g, {0.02}, cfg), std::invalid_argument);
}

TEST_CASE("shell schedule is self-consistent under extrapolation") {
    // S(delta) for a 0-homogeneous integrand follows S0 (1 + c delta + ...);
    // successive differences must shrink roughly geometrically
    const ProductGauge g = euclidean_gauge(1.0);
    QuadratureConfig cfg;
    cfg.budget = 6'000'000;
    cfg.seed = 21;
    const ShellEstimate sh = shell_surface_estimate(one, g, {0.04, 0.02, 0.01}, cfg);
    const double d1 = sh.shell_values[0] - sh.shell_values[1];
    const double d2 = sh.shell_values[1] - sh.shell_values[2];
    CHECK(d1 / d2 >= 1.4);
    CHECK(d1 / d2 <= 2.9);
}

TEST_CASE("box-minus-ball region integrates the excised complement") {
    const ProductGauge g = euclidean_gauge(1.0);
    Vector lo(3), hi(3);
    lo << -0.5, -0.5, -0.125;
    hi << 0.5, 0.5, 0.125;
    QuadratureConfig cfg;
    cfg.budget = 2'000'000;
    cfg.seed = 17;
    const double excision = 0.3;
    const IntegralEstimate outer =
        integrate(one, Region::box_minus_ball(lo, hi, excision), g, cfg);
    const IntegralEstimate inner = integrate(one, Region::gauge_ball(excision), g, cfg);
    const double box_vol = 0.25;
    // the small ball lies inside the box, so the two volumes are complementary
    CHECK(std::abs(outer.value + inner.value - box_vol) <=
          3.0 * (outer.error + inner.error));
}

TEST_CASE("dimension guard for the deterministic methods") {
    const ProductGauge g(MinkowskiNorm::euclidean(3), MinkowskiNorm::euclidean(2), 1.0);
    QuadratureConfig cfg;
    cfg.method = QuadratureConfig::Method::Adaptive;
    CHECK_THROWS_AS(integrate(one, Region::gauge_ball(1.0), g, cfg), std::invalid_argument);
    cfg.method = QuadratureConfig::Method::TensorGauss;
    CHECK_THROWS_AS(integrate(one, Region::gauge_ball(1.0), g, cfg), std::invalid_argument);
    cfg.method = QuadratureConfig::Method::MonteCarlo;
    CHECK_NOTHROW(integrate(one, Region::gauge_ball(1.0), g, cfg));
}
