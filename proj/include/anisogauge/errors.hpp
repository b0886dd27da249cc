#pragma once

#include <stdexcept>
#include <string>

namespace anisogauge {

/// Thrown when an iterative solver stops without meeting its tolerance.
/// Carries the best value found so the caller can still inspect it.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_value, int iterations)
        : std::runtime_error(what), best_value(best_value), iterations(iterations) {}

    double best_value;
    int iterations;
};

/// Evaluation requested at a point where the operator degenerates
/// (zero energy density with p < 2, gradient at the origin, ...).
class DegeneratePointError : public std::domain_error {
    using std::domain_error::domain_error;
};

/// Two redundant computation routes disagree beyond their combined error;
/// signals an implementation bug, not a numerical accident.
class InconsistencyError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace anisogauge
