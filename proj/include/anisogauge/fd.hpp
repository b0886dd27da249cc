#pragma once

#include <cmath>
#include <functional>

#include <Eigen/Dense>

namespace anisogauge {
namespace fd {

using Vector = Eigen::VectorXd;

/// Default step for central differences of once-differentiated quantities:
/// cube root of machine epsilon, the classical truncation/roundoff optimum.
inline double default_step() {
    return std::cbrt(std::numeric_limits<double>::epsilon());
}

inline double scaled_step(double h, double coordinate) {
    return h * std::max(1.0, std::abs(coordinate));
}

/// Central-difference gradient with per-coordinate scaled steps.
Vector gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h);

/// Divergence of a vector field by central differences: sum_i d_i F_i(x).
double divergence(const std::function<Vector(const Vector&)>& field, const Vector& x, double h);

/// Divergence with one Richardson level: (4 D(h/2) - D(h)) / 3, cancelling the
/// leading O(h^2) truncation term.
double divergence_richardson(const std::function<Vector(const Vector&)>& field, const Vector& x,
                             double h);

} // namespace fd
} // namespace anisogauge
