#include "anisogauge/serialize.hpp"

#include <nlohmann/json.hpp>

namespace anisogauge {

json norm_to_json(const MinkowskiNorm& n) {
    json j;
    j["family"] = n.family_name();
    switch (n.family()) {
        case NormFamily::Euclidean:
            j["dim"] = n.dim();
            break;
        case NormFamily::PowerQ:
            j["q"] = n.power_exponent();
            j["dim"] = n.dim();
            break;
        case NormFamily::Quadratic: {
            const Matrix& a = n.quadratic_matrix();
            json rows = json::array();
            for (int i = 0; i < a.rows(); ++i) {
                json row = json::array();
                for (int c = 0; c < a.cols(); ++c) row.push_back(a(i, c));
                rows.push_back(std::move(row));
            }
            j["matrix"] = std::move(rows);
            break;
        }
        case NormFamily::Custom:
            throw std::invalid_argument("norm_to_json: custom norms are not serializable");
    }
    return j;
}

MinkowskiNorm norm_from_json(const json& j) {
    if (!j.is_object() || !j.contains("family"))
        throw std::invalid_argument("norm_from_json: expected an object with a 'family' key");
    const std::string family = j.at("family").get<std::string>();
    if (family == "euclidean") {
        return MinkowskiNorm::euclidean(j.at("dim").get<int>());
    }
    if (family == "power") {
        return MinkowskiNorm::power(j.at("dim").get<int>(), j.at("q").get<double>());
    }
    if (family == "quadratic") {
        const auto& rows = j.at("matrix");
        const int n = static_cast<int>(rows.size());
        Matrix a(n, n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[i].size()) != n)
                throw std::invalid_argument("norm_from_json: matrix must be square");
            for (int c = 0; c < n; ++c) a(i, c) = rows[i][c].get<double>();
        }
        return MinkowskiNorm::quadratic(a);
    }
    throw std::invalid_argument("norm_from_json: unknown family '" + family + "'");
}

json gauge_to_json(const ProductGauge& g) {
    return json{{"phi", norm_to_json(g.phi())},
                {"psi", norm_to_json(g.psi())},
                {"alpha", g.alpha()}};
}

ProductGauge gauge_from_json(const json& j) {
    if (!j.is_object())
        throw std::invalid_argument("gauge_from_json: expected an object");
    return ProductGauge(norm_from_json(j.at("phi")), norm_from_json(j.at("psi")),
                        j.at("alpha").get<double>());
}

json point_to_json(const Point& x) {
    json flat = json::array();
    for (int i = 0; i < x.m(); ++i) flat.push_back(x.z[i]);
    for (int i = 0; i < x.k(); ++i) flat.push_back(x.sigma[i]);
    return json{{"x", std::move(flat)}, {"split", x.m()}};
}

Point point_from_json(const json& j, int split) {
    const json& arr = j.is_object() ? j.at("x") : j;
    if (!arr.is_array()) throw std::invalid_argument("point_from_json: expected a flat array");
    if (j.is_object() && j.contains("split")) split = j.at("split").get<int>();
    Vector flat(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) flat[static_cast<int>(i)] = arr[i].get<double>();
    return Point::from_flat(flat, split);
}

json quadrature_config_to_json(const QuadratureConfig& cfg) {
    return json{{"method", cfg.method_name()},
                {"budget", cfg.budget},
                {"rel_err", cfg.target_rel_error},
                {"seed", cfg.seed},
                {"strata_depth", cfg.stratification_depth}};
}

QuadratureConfig quadrature_config_from_json(const json& j) {
    QuadratureConfig cfg;
    if (j.contains("method")) cfg.method = QuadratureConfig::parse_method(j.at("method"));
    if (j.contains("budget")) cfg.budget = j.at("budget").get<std::int64_t>();
    if (j.contains("rel_err")) cfg.target_rel_error = j.at("rel_err").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("strata_depth")) cfg.stratification_depth = j.at("strata_depth").get<int>();
    cfg.validate();
    return cfg;
}

json constant_estimate_to_json(const ConstantEstimate& est) {
    return json{{"value", est.value}, {"error", est.error},   {"method", est.method},
                {"budget", est.budget}, {"seed", est.seed},   {"warning", est.warning}};
}

} // namespace anisogauge
