#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "anisogauge/gauge.hpp"

namespace anisogauge {

struct QuadratureConfig {
    enum class Method { TensorGauss, Adaptive, MonteCarlo, QuasiMonteCarlo };

    Method method = Method::MonteCarlo;
    std::int64_t budget = 1'000'000;     // max integrand evaluations
    double target_rel_error = 1e-3;
    std::uint64_t seed = 1;
    /// Radial stratification depth for MC/QMC on gauge balls and shells:
    /// samples are re-radialized along the dilation flow into 2^depth strata
    /// of the exact radial law t^(Q-1) dt. Depth 0 disables stratification.
    int stratification_depth = 5;

    void validate() const;
    std::string method_name() const;
    static Method parse_method(const std::string& name);
};

/// Integration domains used by the constant and weak-form computations. The
/// optional sigma offset shifts the gauge pole along the second layer, so the
/// radii refer to rho(z, sigma - offset).
struct Region {
    enum class Kind { GaugeBall, GaugeShell, BoxMinusBall };

    Kind kind = Kind::GaugeBall;
    double r_inner = 0.0;
    double r_outer = 1.0;
    Vector box_lo, box_hi;     // BoxMinusBall only
    Vector sigma_offset;       // empty = no shift

    static Region gauge_ball(double r);
    static Region gauge_shell(double r0, double r1);
    static Region box_minus_ball(Vector lo, Vector hi, double excision);
    Region with_sigma_offset(Vector offset) const;

    void validate() const;
};

struct IntegralEstimate {
    double value = 0.0;
    double error = 0.0;               // MC standard error or cubature bound
    std::int64_t evaluations = 0;
    bool budget_exhausted = false;    // budget spent before target_rel_error
    double acceptance_rate = 0.0;     // rejection samplers only
    double box_volume = 0.0;
    std::string method;
};

/// Integrate a bounded scalar integrand over the region. The bounding box of
/// gauge balls/shells is derived from the layer norms' equivalence constants.
/// Deterministic given (config, seed) regardless of thread count; parallelism
/// is controlled by the ANISOGAUGE_THREADS environment variable.
IntegralEstimate integrate(const std::function<double(const Vector&)>& f, const Region& region,
                           const ProductGauge& g, const QuadratureConfig& cfg);

struct ShellEstimate {
    double value = 0.0;               // extrapolated surface functional
    double error = 0.0;
    std::vector<double> deltas;
    std::vector<double> shell_values; // (1/delta) * shell integral, per delta
    std::vector<double> shell_errors;
    bool monotone = true;             // extrapolation sequence sanity
    bool budget_exhausted = false;
};

/// Thin-shell estimate of the Wulff-sphere surface functional
///   int_{rho=1} f dH / |grad rho|
/// from (1/delta) int_{1 < rho < 1+delta} f dx over a decreasing delta
/// schedule, extrapolated to delta -> 0 (Richardson/Neville on the schedule).
/// f must be 0-homogeneous under the anisotropic dilations.
ShellEstimate shell_surface_estimate(const std::function<double(const Vector&)>& f,
                                     const ProductGauge& g, const std::vector<double>& deltas,
                                     const QuadratureConfig& cfg);

/// Number of worker threads the quadrature engine will use
/// (ANISOGAUGE_THREADS, else hardware concurrency).
int quadrature_threads();

} // namespace anisogauge
