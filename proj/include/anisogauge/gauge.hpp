#pragma once

#include <cstdint>
#include <optional>

#include "anisogauge/norm.hpp"

namespace anisogauge {

/// A point of the product space R^m x R^k, split into the first-layer part z
/// and the second-layer part sigma.
struct Point {
    Vector z;
    Vector sigma;

    Point() = default;
    Point(Vector z, Vector sigma) : z(std::move(z)), sigma(std::move(sigma)) {}

    int m() const { return static_cast<int>(z.size()); }
    int k() const { return static_cast<int>(sigma.size()); }
    int dim() const { return m() + k(); }

    /// Flat layout [z..., sigma...].
    Vector flat() const;
    static Point from_flat(const Vector& x, int m);

    bool is_zero() const { return z.isZero(0.0) && sigma.isZero(0.0); }
};

/// The anisotropic product gauge
///
///   Theta(z, sigma) = (Phi(z)^(2(a+1)) + 4(a+1)^2 Psi(sigma)^2)^(1/(2(a+1)))
///
/// built from Minkowski norms Phi on R^m and Psi on R^k and a parameter
/// alpha > 0, together with its dual gauge
///
///   rho = Theta0 = (Phi0^(2(a+1)) + 4(a+1)^2 (Psi0)^2)^(1/(2(a+1)))
///
/// obtained by replacing each layer norm with its Legendre transform. Both are
/// 1-homogeneous under the dilations (z, sigma) -> (t z, t^(a+1) sigma), and
/// the homogeneous dimension Q = m + (alpha+1) k governs the measure scaling.
/// Immutable after construction; safe to share across threads.
class ProductGauge {
public:
    ProductGauge(MinkowskiNorm phi, MinkowskiNorm psi, double alpha);

    const MinkowskiNorm& phi() const { return phi_; }
    const MinkowskiNorm& psi() const { return psi_; }
    /// Dual layer norms; throw if a custom layer norm supplied no dual.
    const MinkowskiNorm& phi_dual() const;
    const MinkowskiNorm& psi_dual() const;
    bool has_closed_form_duals() const { return phi_dual_.has_value() && psi_dual_.has_value(); }

    double alpha() const { return alpha_; }
    int m() const { return phi_.dim(); }
    int k() const { return psi_.dim(); }
    int dim() const { return m() + k(); }
    /// Homogeneous dimension Q = m + (alpha+1) k.
    double homogeneous_dimension() const { return q_; }

    void check_point(const Point& x) const;
    Point split(const Vector& flat) const { return Point::from_flat(flat, m()); }

    /// The gauge Theta.
    double theta(const Point& x) const;
    /// The dual gauge rho = Theta0, in closed form through the layer duals.
    double theta0(const Point& x) const;
    /// rho from a flat vector; hot-path form used by the quadrature engine.
    double theta0_flat(const Vector& x) const;

    /// Anisotropic dilation (t z, t^(alpha+1) sigma); t must be positive.
    Point dilate(double t, const Point& x) const;

    /// Gradient of rho, flat layout.
    ///   grad_z rho     = Phi0(z)^(2a+1) rho^(-2a-1) grad Phi0(z)
    ///   grad_sigma rho = 4(a+1) Psi0(sigma) rho^(-2a-1) grad Psi0(sigma)
    /// On {z=0} or {sigma=0} the vanished block's component is the continuous
    /// extension 0 (its prefactor vanishes); throws at the origin.
    Vector rho_gradient(const Point& x) const;

    /// Residual of the eikonal identity
    ///   Phi(grad_z rho)^2 + (Phi0(z)^(2a)/4) Psi(grad_sigma rho)^2 - (Phi0(z)/rho)^(2a),
    /// identically zero in exact arithmetic.
    double eikonal_residual(const Point& x) const;

private:
    MinkowskiNorm phi_;
    MinkowskiNorm psi_;
    std::optional<MinkowskiNorm> phi_dual_;
    std::optional<MinkowskiNorm> psi_dual_;
    double alpha_;
    double q_;
};

/// Settings for the constrained maximization defining Theta0 variationally.
struct VariationalConfig {
    int multistarts = 16;
    double tolerance = 1e-12;   // relative objective stall tolerance
    int max_iterations = 600;
    std::uint64_t seed = 0x51e9d1u;

    void validate() const;
};

/// Solves  sup { |<z,xi>|^(a+1) + 4(a+1)^2 <sigma,tau>  :  Theta(xi,tau) = 1 }
/// by projected gradient ascent on the constraint surface (projection along
/// the anisotropic dilation flow) with Armijo backtracking and multi-starts
/// seeded from the Lagrange-system candidates, sign flips, axis directions and
/// random directions. Returns the (a+1)-th root of the best objective, which
/// equals theta0(x) up to optimizer tolerance; the agreement is the numerical
/// certificate that the closed form solves the constrained extremum problem.
/// Throws ConvergenceError (carrying the best value) if no start converges.
double theta0_variational(const ProductGauge& g, const Point& x, const VariationalConfig& cfg = {});

} // namespace anisogauge
