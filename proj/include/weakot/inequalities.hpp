#pragma once

#include "weakot/costs.hpp"
#include "weakot/measures.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace weakot {

/**
@brief Convex piecewise-linear function on the whole line.

Finite breakpoints with values, plus the two end slopes; the full slope
sequence must be non-decreasing. Bounded below exactly when
left_slope <= 0 <= right_slope.
*/
class ConvexPiecewiseLinear {
  public:
    ConvexPiecewiseLinear(VectorXd breakpoints, VectorXd values, double left_slope,
                          double right_slope);

    double operator()(double x) const;
    double slope_left(double x) const;
    double slope_right(double x) const;

    /// |nabla g|(x) = min over the subdifferential of the magnitude: 0 when
    /// the subdifferential straddles 0, else the smaller one-sided slope.
    double nabla_abs(double x) const;

    bool bounded_below() const { return left_slope_ <= 0.0 && right_slope_ >= 0.0; }
    /// A breakpoint attaining the minimum (requires bounded_below).
    double argmin() const;
    double min_value() const { return (*this)(argmin()); }

    const VectorXd& breakpoints() const { return xs_; }
    const VectorXd& values() const { return vs_; }
    double left_slope() const { return left_slope_; }
    double right_slope() const { return right_slope_; }

  private:
    VectorXd xs_, vs_;
    double left_slope_, right_slope_;
};

/**
@brief Largest b with Delta_mu(u) <= (1/b) theta^{-1}(u + t0^2) for all u > 0.

theta must be quadratic on [0, t0]. Delta_mu is a left-continuous step
function of u, and theta^{-1}(u + t0^2)/Delta_mu(u) increases between its
breakpoints, so the infimum is attained at the right limits of the
finitely many breakpoints. Returns +inf for a Dirac (Delta == 0).
*/
double condition_ii_best_b(const DiscreteMeasure& mu, const CostFunction& theta, double t0);

/// kappa1 = t0 / (8 theta^{-1}(log 3 + t0^2)).
double kappa1(const CostFunction& theta, double t0);
/// kappa2 = min(1, t0) / (210 theta^{-1}(2 + t0^2)).
double kappa2(const CostFunction& theta, double t0);

struct PoincareConstants {
    bool degenerate = false; ///< Dirac input: all constants trivial
    double h = 0.0;          ///< Delta_mu(1)
    double D = 0.0;          ///< 5480 h^2
    double l0 = 0.0;         ///< (1/(10 sqrt 2)) / h
};

PoincareConstants poincare_constants(const DiscreteMeasure& mu);

struct KPlusMinus {
    double k_plus = 0.0;
    double k_minus = 0.0;
};

/**
@brief Exponential-tail ratios K+/- (b) at the median m = F^{-1}(1/2).

K+(b) = sup over atoms x >= m of (1/mu(x, inf)) * int_(x,inf)
e^{beta(b(u-x))} mu(du), with the 0/0 = 0 convention; K- mirrors on the
left. The supremum over real x is attained at atoms, so finite sums
suffice. The exact mirror symmetry K+/K- swap holds whenever the median
is unique (the generalized-inverse convention breaks ties one-sidedly).
*/
KPlusMinus k_plus_minus(const DiscreteMeasure& mu, const CostFunction& beta, double b);

/**
@brief Inf-convolution Q_t g(x) = inf_y { g(y) + t theta(|x - y|/t) }.

g must be bounded below. The objective is convex in y and its minimizer
lies between argmin g and x, so a golden-section search on that bracket
is exact to tolerance.
*/
VectorXd inf_convolution(const ConvexPiecewiseLinear& g, const CostFunction& theta, double t,
                         const Eigen::Ref<const VectorXd>& x_grid);

/**
@brief Worst weak-duality gap over candidate potentials.

Returns max over phi of (int Q_1 phi d nu - int phi d mu) - Tbar_theta(mu|nu).
Weak duality makes every candidate a lower bound of Tbar_theta(mu|nu)
(Jensen on kernel rows), so the gap must be <= 1e-8.
*/
double dual_gap(const DiscreteMeasure& nu, const DiscreteMeasure& mu, const CostFunction& theta,
                const std::vector<ConvexPiecewiseLinear>& potentials,
                std::optional<Eigen::Index> refinement = std::nullopt);

enum class StepDirection {
    backward, ///< difference f(x) - f(x-1)
    forward   ///< difference f(x+1) - f(x)
};

struct LogSobolevResult {
    double lhs = 0.0; ///< Ent_tau(e^f)
    double rhs = 0.0; ///< 2740 * int (unit-step difference)^2 e^f dtau
    bool holds = false;
};

/**
@brief Discrete log-Sobolev inequality for the symmetric exponential law.

Hypothesis gate: f non-decreasing with unit-step increments at most
1/(10 sqrt 2) + 1e-12, checked on the quadrature grid; violations are
rejected. Both sides by composite Simpson on [-R, R].
*/
LogSobolevResult log_sobolev_check(const std::function<double(double)>& f,
                                   StepDirection direction, double quadrature_R = 30.0,
                                   int quadrature_N = 200000);

struct ProbeResult {
    double min_slack = 0.0; ///< min over trials and both directions
    double best_b = 0.0;
    double a = 0.0; ///< kappa2 * best_b
    int trials = 0;
};

/**
@brief End-to-end transport-entropy probe.

With a = kappa2 * best_b, samples `trials` Dirichlet(1) reweightings nu of
mu (seeded) and returns the smallest slack H(nu|mu) - Tbar_{theta(a.)} in
both directions; the characterization guarantees it is non-negative.
*/
ProbeResult entropy_inequality_probe(const DiscreteMeasure& mu, const CostFunction& theta,
                                     double t0, int trials, std::uint64_t seed);

struct DiagnosticsReport {
    bool degenerate = false;
    double h = 0.0;
    double best_b = 0.0; ///< +inf when degenerate
    double a_from_b = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double D = 0.0;
    double l0 = 0.0;
    double k_plus = 0.0;  ///< at beta = [theta - t^2]_+, b = best_b
    double k_minus = 0.0;
    bool condition_ii_finite = false;
    bool kpm_finite = false;
};

/// Assemble the full diagnostics for mu under theta (quadratic on [0,t0]).
DiagnosticsReport diagnose(const DiscreteMeasure& mu, const CostFunction& theta, double t0);

} // namespace weakot
