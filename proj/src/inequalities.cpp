#include "weakot/inequalities.hpp"

#include "weakot/rng.hpp"
#include "weakot/weak_transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace weakot {

namespace {

constexpr double kInv10Sqrt2 = 0.070710678118654752; // 1/(10 sqrt 2)
constexpr double kPoincareKappa = 5480.0;
constexpr double kLogSobolevConstant = 2740.0;

template <typename F> double golden_min_value(const F& phi, double lo, double hi, int iters = 90) {
    constexpr double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = phi(x1);
    double f2 = phi(x2);
    for (int k = 0; k < iters; ++k) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = phi(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = phi(x2);
        }
    }
    return std::min(f1, f2);
}

} // namespace

ConvexPiecewiseLinear::ConvexPiecewiseLinear(VectorXd breakpoints, VectorXd values,
                                             double left_slope, double right_slope)
    : xs_(std::move(breakpoints)), vs_(std::move(values)), left_slope_(left_slope),
      right_slope_(right_slope) {
    if (xs_.size() == 0 || xs_.size() != vs_.size())
        throw std::invalid_argument("piecewise linear: bad breakpoint/value shapes");
    double prev = left_slope_;
    for (Eigen::Index k = 0; k + 1 < xs_.size(); ++k) {
        if (!(xs_(k) < xs_(k + 1)))
            throw std::invalid_argument("piecewise linear: breakpoints must increase");
        const double s = (vs_(k + 1) - vs_(k)) / (xs_(k + 1) - xs_(k));
        if (s < prev - 1e-12)
            throw std::invalid_argument("piecewise linear: slopes decrease (not convex)");
        prev = s;
    }
    if (right_slope_ < prev - 1e-12)
        throw std::invalid_argument("piecewise linear: slopes decrease (not convex)");
}

double ConvexPiecewiseLinear::operator()(double x) const {
    if (x <= xs_(0)) return vs_(0) + left_slope_ * (x - xs_(0));
    const Eigen::Index m = xs_.size();
    if (x >= xs_(m - 1)) return vs_(m - 1) + right_slope_ * (x - xs_(m - 1));
    const double* begin = xs_.data();
    const auto k = std::upper_bound(begin, begin + m, x) - begin; // xs_(k-1) <= x < xs_(k)
    const double t = (x - xs_(k - 1)) / (xs_(k) - xs_(k - 1));
    return vs_(k - 1) + t * (vs_(k) - vs_(k - 1));
}

double ConvexPiecewiseLinear::slope_left(double x) const {
    if (x <= xs_(0)) return left_slope_;
    const Eigen::Index m = xs_.size();
    if (x > xs_(m - 1)) return right_slope_;
    const double* begin = xs_.data();
    const auto k = std::lower_bound(begin, begin + m, x) - begin; // first >= x
    if (xs_(k) == x)
        return k == 0 ? left_slope_ : (vs_(k) - vs_(k - 1)) / (xs_(k) - xs_(k - 1));
    return (vs_(k) - vs_(k - 1)) / (xs_(k) - xs_(k - 1));
}

double ConvexPiecewiseLinear::slope_right(double x) const {
    if (x < xs_(0)) return left_slope_;
    const Eigen::Index m = xs_.size();
    if (x >= xs_(m - 1)) return right_slope_;
    const double* begin = xs_.data();
    const auto k = std::upper_bound(begin, begin + m, x) - begin; // first > x
    return (vs_(k) - vs_(k - 1)) / (xs_(k) - xs_(k - 1));
}

double ConvexPiecewiseLinear::nabla_abs(double x) const {
    const double sl = slope_left(x);
    const double sr = slope_right(x);
    if (sl <= 0.0 && 0.0 <= sr) return 0.0;
    return std::min(std::abs(sl), std::abs(sr));
}

double ConvexPiecewiseLinear::argmin() const {
    if (!bounded_below()) throw std::domain_error("piecewise linear: unbounded below");
    for (Eigen::Index k = 0; k < xs_.size(); ++k)
        if (slope_right(xs_(k)) >= 0.0) return xs_(k);
    return xs_(xs_.size() - 1);
}

// ---------------------------------------------------------------------

double condition_ii_best_b(const DiscreteMeasure& mu, const CostFunction& theta, double t0) {
    if (!(t0 > 0.0)) throw std::invalid_argument("condition_ii: t0 must be positive");
    if (!is_quadratic_near_zero(theta, t0))
        throw std::invalid_argument("condition_ii: theta is not quadratic on [0,t0]");
    const Eigen::Index m = mu.size();
    if (m < 2) return std::numeric_limits<double>::infinity();

    const VectorXd& a = mu.atoms();
    VectorXd s(m - 1);
    for (Eigen::Index k = 0; k + 1 < m; ++k) s(k) = exp_quantile(mu.cumulative()(k));

    // All (threshold, gain) pairs of Delta_mu: the pair (i, j) becomes
    // feasible once u exceeds s_{j-1} - s_i.
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
    for (Eigen::Index i = 0; i + 1 < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j)
            pairs.push_back({s(j - 1) - s(i), a(j) - a(i)});
    std::sort(pairs.begin(), pairs.end());

    double best = std::numeric_limits<double>::infinity();
    double gain = 0.0;
    for (std::size_t k = 0; k < pairs.size();) {
        const double threshold = pairs[k].first;
        while (k < pairs.size() && pairs[k].first == threshold) {
            gain = std::max(gain, pairs[k].second);
            ++k;
        }
        // Right limit of the interval starting at this breakpoint.
        best = std::min(best, theta.inverse(threshold + t0 * t0) / gain);
    }
    return best;
}

double kappa1(const CostFunction& theta, double t0) {
    return t0 / (8.0 * theta.inverse(std::log(3.0) + t0 * t0));
}

double kappa2(const CostFunction& theta, double t0) {
    return std::min(1.0, t0) / (210.0 * theta.inverse(2.0 + t0 * t0));
}

PoincareConstants poincare_constants(const DiscreteMeasure& mu) {
    PoincareConstants out;
    if (mu.size() < 2) {
        out.degenerate = true;
        return out;
    }
    out.h = modulus(mu, 1.0);
    out.D = kPoincareKappa * out.h * out.h;
    out.l0 = kInv10Sqrt2 / out.h;
    return out;
}

KPlusMinus k_plus_minus(const DiscreteMeasure& mu, const CostFunction& beta, double b) {
    if (!(b > 0.0)) throw std::invalid_argument("k_plus_minus: b must be positive");
    const double m = mu.median();
    const VectorXd& x = mu.atoms();
    const VectorXd& w = mu.weights();

    KPlusMinus out;
    for (Eigen::Index t = 0; t < x.size(); ++t) {
        if (x(t) < m) continue;
        double tail = 0.0;
        double num = 0.0;
        for (Eigen::Index u = t + 1; u < x.size(); ++u) {
            tail += w(u);
            num += w(u) * std::exp(beta(b * (x(u) - x(t))));
        }
        if (tail > 0.0) out.k_plus = std::max(out.k_plus, num / tail);
    }
    for (Eigen::Index t = 0; t < x.size(); ++t) {
        if (x(t) > m) continue;
        double head = 0.0;
        double num = 0.0;
        // Descending accumulation mirrors K+ exactly on reflected measures.
        for (Eigen::Index u = t - 1; u >= 0; --u) {
            head += w(u);
            num += w(u) * std::exp(beta(b * (x(t) - x(u))));
        }
        if (head > 0.0) out.k_minus = std::max(out.k_minus, num / head);
    }
    return out;
}

VectorXd inf_convolution(const ConvexPiecewiseLinear& g, const CostFunction& theta, double t,
                         const Eigen::Ref<const VectorXd>& x_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("inf_convolution: t must be positive");
    if (!g.bounded_below()) throw std::invalid_argument("inf_convolution: g unbounded below");
    const double y0 = g.argmin();

    VectorXd out(x_grid.size());
    for (Eigen::Index k = 0; k < x_grid.size(); ++k) {
        const double x = x_grid(k);
        const auto phi = [&](double y) { return g(y) + t * theta(std::abs(x - y) / t); };
        const double lo = std::min(x, y0);
        const double hi = std::max(x, y0);
        double best = std::min(phi(lo), phi(hi));
        if (hi > lo) best = std::min(best, golden_min_value(phi, lo, hi));
        out(k) = best;
    }
    return out;
}

double dual_gap(const DiscreteMeasure& nu, const DiscreteMeasure& mu, const CostFunction& theta,
                const std::vector<ConvexPiecewiseLinear>& potentials,
                std::optional<Eigen::Index> refinement) {
    // Candidates bound the swapped-direction cost from below: Q phi against
    // the kernel-source side nu, phi against the barycenter side mu.
    const double tbar = weak_cost(mu, nu, theta, refinement).value;
    double worst = -std::numeric_limits<double>::infinity();
    for (const ConvexPiecewiseLinear& phi : potentials) {
        const VectorXd q = inf_convolution(phi, theta, 1.0, nu.atoms());
        double candidate = q.dot(nu.weights());
        for (Eigen::Index j = 0; j < mu.size(); ++j)
            candidate -= mu.weights()(j) * phi(mu.atoms()(j));
        worst = std::max(worst, candidate - tbar);
    }
    return worst;
}

LogSobolevResult log_sobolev_check(const std::function<double(double)>& f,
                                   StepDirection direction, double quadrature_R,
                                   int quadrature_N) {
    if (!(quadrature_R > 1.0)) throw std::invalid_argument("log_sobolev: R must exceed 1");
    int N = quadrature_N;
    if (N < 2) throw std::invalid_argument("log_sobolev: need at least 2 panels");
    if (N % 2 == 1) ++N;
    const double R = quadrature_R;
    const double h = 2.0 * R / static_cast<double>(N);

    // Hypothesis gate on the quadrature grid: monotone, unit-step
    // increments within the lemma's bound.
    double prev = f(-R);
    for (int i = 0; i <= N; ++i) {
        const double xi = -R + h * static_cast<double>(i);
        const double fi = f(xi);
        if (fi < prev - 1e-12)
            throw std::invalid_argument("log_sobolev: f is not non-decreasing");
        if (fi - f(xi - 1.0) > kInv10Sqrt2 + 1e-12)
            throw std::invalid_argument("log_sobolev: unit-step increment exceeds 1/(10 sqrt 2)");
        prev = fi;
    }

    const auto tau_density = [](double x) { return 0.5 * std::exp(-std::abs(x)); };
    double mass = 0.0;     // int e^f dtau
    double mean_fef = 0.0; // int f e^f dtau
    double quad = 0.0;     // int (difference)^2 e^f dtau
    for (int i = 0; i <= N; ++i) {
        const double xi = -R + h * static_cast<double>(i);
        const double simpson = (i == 0 || i == N) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double weight = simpson * h / 3.0 * tau_density(xi);
        const double fi = f(xi);
        const double ef = std::exp(fi);
        const double diff =
            direction == StepDirection::backward ? fi - f(xi - 1.0) : f(xi + 1.0) - fi;
        mass += weight * ef;
        mean_fef += weight * fi * ef;
        quad += weight * diff * diff * ef;
    }

    LogSobolevResult out;
    out.lhs = mean_fef - mass * std::log(mass);
    out.rhs = kLogSobolevConstant * quad;
    out.holds = out.lhs <= out.rhs + 1e-9;
    return out;
}

ProbeResult entropy_inequality_probe(const DiscreteMeasure& mu, const CostFunction& theta,
                                     double t0, int trials, std::uint64_t seed) {
    if (mu.size() < 2) throw std::invalid_argument("probe: degenerate measure");
    if (trials <= 0) throw std::invalid_argument("probe: trials must be positive");

    ProbeResult out;
    out.trials = trials;
    out.best_b = condition_ii_best_b(mu, theta, t0);
    if (!std::isfinite(out.best_b) || !(out.best_b > 0.0))
        throw std::invalid_argument("probe: condition (ii) constant is not finite/positive");
    out.a = kappa2(theta, t0) * out.best_b;
    const CostFunction scaled = CostFunction::scaled(theta, out.a);

    Rng rng(seed);
    out.min_slack = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
        VectorXd w(mu.size());
        for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.exponential();
        const DiscreteMeasure nu(mu.atoms(), w); // Dirichlet(1) reweighting
        const double entropy = relative_entropy(nu, mu);
        const double forward = weak_cost(nu, mu, scaled).value;
        const double backward = weak_cost(mu, nu, scaled).value;
        out.min_slack = std::min({out.min_slack, entropy - forward, entropy - backward});
    }
    return out;
}

DiagnosticsReport diagnose(const DiscreteMeasure& mu, const CostFunction& theta, double t0) {
    DiagnosticsReport rep;
    rep.kappa1 = kappa1(theta, t0);
    rep.kappa2 = kappa2(theta, t0);

    const PoincareConstants pc = poincare_constants(mu);
    rep.degenerate = pc.degenerate;
    rep.h = pc.h;
    rep.D = pc.D;
    rep.l0 = pc.l0;

    rep.best_b = condition_ii_best_b(mu, theta, t0);
    rep.condition_ii_finite = std::isfinite(rep.best_b) && rep.best_b > 0.0;
    if (rep.condition_ii_finite) {
        rep.a_from_b = rep.kappa2 * rep.best_b;
        const CostFunction beta = CostFunction::quad_excess_of(theta, t0);
        const KPlusMinus kpm = k_plus_minus(mu, beta, rep.best_b);
        rep.k_plus = kpm.k_plus;
        rep.k_minus = kpm.k_minus;
        rep.kpm_finite = std::isfinite(rep.k_plus) && std::isfinite(rep.k_minus);
    }
    return rep;
}

} // namespace weakot
