#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "anisogauge/errors.hpp"
#include "anisogauge/field.hpp"

namespace anisogauge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Points closer to the origin than this are rejected instead of regularized:
/// the norms are only differentiable away from 0 and silent smoothing would
/// corrupt the identity checks built on top of them.
inline constexpr double kOriginExclusionRadius = 1e-8;

enum class NormFamily { Euclidean, PowerQ, Quadratic, Custom };

/// An even Minkowski norm on R^n: positively 1-homogeneous, C^2 away from the
/// origin, with analytic value/gradient and (when available) a closed-form dual.
///
/// Built-in families:
///   euclidean    N(x) = |x|
///   power-q      N(x) = (sum |x_i|^q)^(1/q),  q in (1, inf)
///   quadratic    N(x) = <Ax, x>^(1/2),        A symmetric positive definite
///   custom       caller-supplied evaluators
///
/// Descriptors are immutable after construction and safe to share across threads.
class MinkowskiNorm {
public:
    using ValueFn = std::function<double(const Vector&)>;
    using GradientFn = std::function<Vector(const Vector&)>;

    static MinkowskiNorm euclidean(int dim);
    static MinkowskiNorm power(int dim, double q);
    static MinkowskiNorm quadratic(const Matrix& a);

    /// Custom norm. `dual_value`/`dual_gradient` are optional; without them the
    /// norm has no closed-form dual and dual-based operations fall back to the
    /// variational route (or refuse, where a gradient of the dual is required).
    static MinkowskiNorm custom(int dim, ValueFn value, GradientFn gradient,
                                ValueFn dual_value = nullptr,
                                GradientFn dual_gradient = nullptr);

    int dim() const { return dim_; }
    NormFamily family() const { return family_; }

    /// Exponent of a power-q norm; throws for other families.
    double power_exponent() const;
    /// Matrix of a quadratic norm; throws for other families.
    const Matrix& quadratic_matrix() const;

    double value(Eigen::Ref<const Vector> x) const;

    /// Analytic gradient; 0-homogeneous. Throws DegeneratePointError inside the
    /// origin exclusion ball.
    Vector gradient(Eigen::Ref<const Vector> x) const;

    bool has_closed_form_dual() const;

    /// Closed-form dual norm N0(x) = sup_{N(xi)=1} <x, xi>.
    /// euclidean -> itself, power-q -> power-q' with 1/q + 1/q' = 1,
    /// quadratic A -> quadratic A^{-1}. Throws if unavailable.
    MinkowskiNorm dual() const;

    /// Equivalence constants (a, b) with a|x| <= N(x) <= b|x|; exact for the
    /// built-in families, estimated by direction sampling for custom norms.
    std::pair<double, double> equivalence_bounds() const;

    std::string family_name() const;

private:
    MinkowskiNorm() = default;

    void check_dim(Eigen::Ref<const Vector> x) const;

    NormFamily family_ = NormFamily::Euclidean;
    int dim_ = 0;

    // power-q
    double q_ = 2.0;

    // quadratic; factored once so value/gradient/dual are cheap
    struct QuadraticData {
        Matrix a;
        Matrix a_inv;
    };
    std::shared_ptr<const QuadraticData> quad_;

    struct CustomData {
        ValueFn value;
        GradientFn gradient;
        ValueFn dual_value;
        GradientFn dual_gradient;
        std::pair<double, double> bounds;
    };
    std::shared_ptr<const CustomData> custom_;
};

/// How to resolve dual-norm values.
struct DualResolution {
    enum class Mode { ClosedForm, Variational };

    Mode mode = Mode::ClosedForm;
    int multistarts = 8;
    double tolerance = 1e-10;
    int max_iterations = 200;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;

    void validate() const;
};

/// Dual norm value N0(x). Closed-form mode uses the analytic dual; variational
/// mode runs projected gradient ascent of <x, xi> on the unit N-sphere with
/// Armijo backtracking and multi-starts, and throws ConvergenceError (carrying
/// the best value found) if the iteration limit is hit before the tolerance.
double dual_value(const MinkowskiNorm& n, const Vector& x, const DualResolution& res);

/// Max residuals of the classical duality identities over random nonzero samples:
///   gradient_on_sphere:   N(grad N0(x)) - 1  and  N0(grad N(x)) - 1
///   gradient_inversion:   |N0(x) grad N(grad N0(x)) - x|  and the dual statement
///   cauchy_schwarz:       positive part of |<x,y>| - N(x) N0(y)
///   double_dual:          |(N0)0(x) - N(x)| with the outer dual resolved variationally
///   euler:                |<grad N(x), x> - N(x)|
struct DualityReport {
    double gradient_on_sphere_primal = 0.0;
    double gradient_on_sphere_dual = 0.0;
    double gradient_inversion_primal = 0.0;
    double gradient_inversion_dual = 0.0;
    double cauchy_schwarz_violation = 0.0;
    double double_dual = 0.0;
    double euler = 0.0;
    int samples = 0;

    double worst_identity_residual() const;
};

DualityReport verify_duality_suite(const MinkowskiNorm& n, int sample_count,
                                   std::uint64_t seed,
                                   const DualResolution& double_dual_res = {
                                       DualResolution::Mode::Variational, 8, 1e-8, 400});

/// Finsler Laplacian Delta_N u = div(N(grad u) grad N(grad u)) at x, computed
/// as central differences of the flux field with one Richardson level. Inner
/// gradients are analytic when the field supplies them, nested differences
/// otherwise. Throws DegeneratePointError when grad u(x) = 0 (the flux is
/// undefined at critical points). h <= 0 selects the default step.
double finsler_laplacian(const MinkowskiNorm& n, const ScalarField& u, const Vector& x,
                         double h = 0.0);

} // namespace anisogauge
