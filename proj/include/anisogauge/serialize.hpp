#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "anisogauge/fundsol.hpp"
#include "anisogauge/gauge.hpp"
#include "anisogauge/norm.hpp"
#include "anisogauge/quadrature.hpp"

namespace anisogauge {

using json = nlohmann::json;

/// Norm descriptors:
///   {"family":"euclidean","dim":3}
///   {"family":"power","q":4,"dim":2}
///   {"family":"quadratic","matrix":[[4,0],[0,1]]}
json norm_to_json(const MinkowskiNorm& n);
MinkowskiNorm norm_from_json(const json& j);

/// Gauges: {"phi": <norm>, "psi": <norm>, "alpha": 1.0}
json gauge_to_json(const ProductGauge& g);
ProductGauge gauge_from_json(const json& j);

/// Points travel as flat arrays [z..., sigma...] with a declared split index.
json point_to_json(const Point& x);
Point point_from_json(const json& flat_array, int split);

json quadrature_config_to_json(const QuadratureConfig& cfg);
QuadratureConfig quadrature_config_from_json(const json& j);

json constant_estimate_to_json(const ConstantEstimate& est);

} // namespace anisogauge
