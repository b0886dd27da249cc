#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace anisogauge {

/// One verification criterion of the built-in battery: a named check with a
/// pinned threshold, run at a pinned budget. `measured` is the worst observed
/// quantity the threshold applies to (a residual, a deviation or a ratio).
struct CriterionResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    double seconds = 0.0;
    std::string detail;
};

/// Names of the battery's criteria, in execution order.
std::vector<std::string> acceptance_criterion_names();

/// Runs one criterion; throws std::invalid_argument for unknown names.
CriterionResult run_acceptance_criterion(const std::string& name, std::uint64_t seed = 20240901);

/// Runs the given criteria (all when the list is empty).
std::vector<CriterionResult> run_acceptance_suite(const std::vector<std::string>& names = {},
                                                  std::uint64_t seed = 20240901);

} // namespace anisogauge
