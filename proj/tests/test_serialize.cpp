#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "anisogauge/rng.hpp"
#include "anisogauge/serialize.hpp"

using namespace anisogauge;

TEST_CASE("norm descriptors parse from their documented JSON forms") {
    const auto power = norm_from_json(json::parse(R"({"family":"power","q":4,"dim":2})"));
    CHECK(power.family() == NormFamily::PowerQ);
    CHECK(power.power_exponent() == doctest::Approx(4.0));
    CHECK(power.dim() == 2);

    const auto quad = norm_from_json(json::parse(R"({"family":"quadratic","matrix":[[4,0],[0,1]]})"));
    CHECK(quad.family() == NormFamily::Quadratic);
    Vector x(2);
    x << 1, 0;
    CHECK(quad.value(x) == doctest::Approx(2.0));

    const auto euc = norm_from_json(json::parse(R"({"family":"euclidean","dim":3})"));
    CHECK(euc.dim() == 3);
}

TEST_CASE("norm JSON round trip preserves evaluation") {
    Matrix a(2, 2);
    a << 3.0, 1.0, 1.0, 2.0;
    std::mt19937_64 rng = make_rng(3);
    for (const MinkowskiNorm& n : {MinkowskiNorm::euclidean(3), MinkowskiNorm::power(2, 2.5),
                                   MinkowskiNorm::quadratic(a)}) {
        const MinkowskiNorm back = norm_from_json(norm_to_json(n));
        for (int i = 0; i < 10; ++i) {
            const Vector x = random_test_point(rng, n.dim());
            CHECK(back.value(x) == doctest::Approx(n.value(x)).epsilon(1e-15));
        }
    }
}

TEST_CASE("invalid norm JSON is rejected") {
    CHECK_THROWS_AS(norm_from_json(json::parse(R"({"family":"power","q":1,"dim":2})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(norm_from_json(json::parse(R"({"family":"l-infinity","dim":2})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(norm_from_json(json::parse(R"([1,2,3])")), std::invalid_argument);
    CHECK_THROWS_AS(norm_from_json(json::parse(R"({"family":"quadratic","matrix":[[1,2],[2,1]]})")),
                    std::invalid_argument);
}

TEST_CASE("gauge JSON round trip") {
    const ProductGauge g(MinkowskiNorm::power(2, 4.0), MinkowskiNorm::euclidean(1), 0.5);
    const ProductGauge back = gauge_from_json(gauge_to_json(g));
    CHECK(back.alpha() == doctest::Approx(0.5));
    CHECK(back.m() == 2);
    CHECK(back.k() == 1);
    std::mt19937_64 rng = make_rng(7);
    for (int i = 0; i < 10; ++i) {
        const Point x(random_test_point(rng, 2), random_test_point(rng, 1));
        CHECK(back.theta0(x) == doctest::Approx(g.theta0(x)).epsilon(1e-15));
    }

    const auto parsed = gauge_from_json(json::parse(
        R"({"phi":{"family":"euclidean","dim":2},"psi":{"family":"euclidean","dim":1},"alpha":1.0})"));
    CHECK(parsed.homogeneous_dimension() == doctest::Approx(4.0));
    CHECK_THROWS_AS(gauge_from_json(json::parse(
                        R"({"phi":{"family":"euclidean","dim":2},"psi":{"family":"euclidean","dim":1},"alpha":0.0})")),
                    std::invalid_argument);
}

TEST_CASE("points serialize as flat arrays with a split index") {
    Vector z(2), s(1);
    z << 1.5, -2.0;
    s << 0.25;
    const Point x(z, s);
    const json j = point_to_json(x);
    CHECK(j.at("split").get<int>() == 2);
    CHECK(j.at("x").size() == 3);

    const Point back = point_from_json(j, -1);
    CHECK((back.z - x.z).norm() == 0.0);
    CHECK((back.sigma - x.sigma).norm() == 0.0);

    const Point bare = point_from_json(json::parse("[1.0, 2.0, 3.0]"), 2);
    CHECK(bare.m() == 2);
    CHECK(bare.sigma[0] == 3.0);
}

TEST_CASE("quadrature config round trip") {
    QuadratureConfig cfg;
    cfg.method = QuadratureConfig::Method::QuasiMonteCarlo;
    cfg.budget = 123456;
    cfg.target_rel_error = 5e-3;
    cfg.seed = 987654321;
    cfg.stratification_depth = 4;
    const QuadratureConfig back = quadrature_config_from_json(quadrature_config_to_json(cfg));
    CHECK(back.method == cfg.method);
    CHECK(back.budget == cfg.budget);
    CHECK(back.target_rel_error == doctest::Approx(cfg.target_rel_error));
    CHECK(back.seed == cfg.seed);
    CHECK(back.stratification_depth == cfg.stratification_depth);
}
