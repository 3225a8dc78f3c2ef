#pragma once

#include <memory>
#include <string>

namespace weakot {

namespace detail {
struct CostNode;
}

/**
@brief A convex cost: theta : R+ -> R+, theta(0) = 0, non-decreasing.

Value type over an immutable shared node. The family is closed under
scaling of the argument and pointwise sums; constructors reject parameters
that would break convexity, so every instance is convex by construction.

inverse(y) is the generalized inverse inf{t : theta(t) >= y} for every
kind except quad_excess, whose inverse is defined as base.inverse(y + t0^2)
(the shifted inverse of its base cost — the quantity the modulus condition
consumes).
*/
class CostFunction {
  public:
    /// theta(t); requires t >= 0.
    double operator()(double t) const;

    /// Right derivative; the right limit is taken at kinks.
    double deriv_right(double t) const;

    /// inf{t >= 0 : theta(t) >= y} for y > 0 (see class note for
    /// quad_excess). Closed form where available, monotone bisection to
    /// relative tolerance 1e-12 otherwise.
    double inverse(double y) const;

    /// Canonical grammar string for reports.
    std::string spec() const;

    // -- constructors --------------------------------------------------

    /// t^p with p >= 1.
    static CostFunction power(double p);

    /// t^2 on [0,t0], then the tangent continuation 2*t*t0 - t0^2.
    static CostFunction quad_lin(double t0);

    /// (t - t0)_+^p: the excess [base - t^2]_+ of base(t) = t^2 + (t-t0)_+^p.
    static CostFunction quad_excess(double t0, double p);

    /// [base(t) - t^2]_+ for an arbitrary base that is quadratic on [0,t0].
    static CostFunction quad_excess_of(CostFunction base, double t0);

    /// u^2/(2D) for u <= l0*D, then l0*u - l0^2*D/2.
    static CostFunction capped_quad(double D, double l0);

    /// t -> inner(a*t), a > 0.
    static CostFunction scaled(CostFunction inner, double a);

    static CostFunction sum(CostFunction lhs, CostFunction rhs);

  private:
    explicit CostFunction(std::shared_ptr<const detail::CostNode> node);
    std::shared_ptr<const detail::CostNode> node_;
};

/**
@brief Parse a cost spec string.

Grammar:
  power:p=<f> | quadlin:t0=<f> | quadexcess:t0=<f>,p=<f> | alpha:D=<f>,l0=<f>
  | scale:a=<f>(<spec>) | sum(<spec>;<spec>)

Throws std::invalid_argument with the offending position on parse errors
and on non-convex parameters.
*/
CostFunction parse_theta(const std::string& spec);

/// max_{t in [0,t0]} |theta(t) - t^2| <= 1e-9*max(1,t0^2), on a 257-point grid.
bool is_quadratic_near_zero(const CostFunction& theta, double t0);

} // namespace weakot
