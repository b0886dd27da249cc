#pragma once

#include <functional>
#include <memory>
#include <string>

#include <Eigen/Dense>

namespace anisogauge {

using Vector = Eigen::VectorXd;

/// A scalar field on R^d given by an evaluator, an optional analytic gradient,
/// and an optional smoothness predicate describing where derivative-based
/// operations may be applied. Without a gradient, callers fall back to central
/// finite differences; without a predicate, the whole space is assumed smooth.
struct ScalarField {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;          // optional
    std::function<bool(const Vector&)> smooth_at;           // optional
    std::string name;

    bool has_gradient() const { return static_cast<bool>(gradient); }
    bool is_smooth_at(const Vector& x) const { return !smooth_at || smooth_at(x); }
};

/// A C^2 profile F on (0, inf) with its first two derivatives, used to build
/// radial fields F(rho). `singular_at_zero` marks profiles that blow up at 0
/// (negative powers, log) so samplers can keep away from the pole.
struct RadialProfile {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> ddf;
    std::string name;
    bool singular_at_zero = false;
};

/// Built-in profile registry: "identity", "square", "log", "power" (with
/// exponent gamma; also accepts the spelled form "power:<gamma>").
RadialProfile make_profile(const std::string& name, double gamma = 1.0);

/// a*F1 + b*F2, derivative-wise.
RadialProfile combine_profiles(double a, const RadialProfile& f1, double b,
                               const RadialProfile& f2);

} // namespace anisogauge
