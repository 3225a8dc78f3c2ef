#include "weakot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace weakot {

namespace {

VectorXd uniform_weights(Eigen::Index n) {
    return VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

} // namespace

DiscreteMeasure::DiscreteMeasure(const Eigen::Ref<const VectorXd>& raw_atoms)
    : DiscreteMeasure(raw_atoms, uniform_weights(raw_atoms.size())) {}

DiscreteMeasure::DiscreteMeasure(const Eigen::Ref<const VectorXd>& raw_atoms,
                                 const Eigen::Ref<const VectorXd>& raw_weights) {
    const Eigen::Index n = raw_atoms.size();
    if (n == 0) throw std::invalid_argument("measure: empty atom list");
    if (raw_weights.size() != n)
        throw std::invalid_argument("measure: atoms/weights length mismatch");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index i, Eigen::Index j) { return raw_atoms(i) < raw_atoms(j); });

    std::vector<double> atoms;
    std::vector<double> weights;
    atoms.reserve(static_cast<std::size_t>(n));
    weights.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        const double x = raw_atoms(order[static_cast<std::size_t>(k)]);
        const double w = raw_weights(order[static_cast<std::size_t>(k)]);
        if (!std::isfinite(x)) throw std::invalid_argument("measure: non-finite atom");
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("measure: non-positive weight");
        if (!atoms.empty() && x == atoms.back()) {
            weights.back() += w; // merge duplicate atoms
        } else {
            atoms.push_back(x);
            weights.push_back(w);
        }
    }

    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const Eigen::Index m = static_cast<Eigen::Index>(atoms.size());
    atoms_ = Eigen::Map<const VectorXd>(atoms.data(), m);
    weights_ = Eigen::Map<const VectorXd>(weights.data(), m) / total;

    cum_.resize(m);
    double run = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
        run += weights_(k);
        cum_(k) = run;
    }
    cum_(m - 1) = 1.0; // renormalized exactly
}

DiscreteMeasure DiscreteMeasure::dirac(double x) {
    VectorXd a(1);
    a(0) = x;
    return DiscreteMeasure(a);
}

double DiscreteMeasure::cdf(double x) const {
    const double* begin = atoms_.data();
    const double* end = begin + atoms_.size();
    const auto count = std::upper_bound(begin, end, x) - begin;
    return count == 0 ? 0.0 : cum_(count - 1);
}

double DiscreteMeasure::quantile(double u) const {
    if (!(u > 0.0) || u > 1.0)
        throw std::domain_error("quantile: u must lie in (0, 1]");
    const double* begin = cum_.data();
    const double* end = begin + cum_.size();
    const auto k = std::lower_bound(begin, end, u) - begin;
    return atoms_(k);
}

double TransportMap::operator()(double x) const {
    const double* begin = jumps.data();
    const double* end = begin + jumps.size();
    const auto k = std::lower_bound(begin, end, x) - begin; // first jump >= x
    return values(k);
}

double exp_quantile(double p) {
    return p <= 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
}

TransportMap u_map(const DiscreteMeasure& mu) {
    const Eigen::Index m = mu.size();
    TransportMap map;
    map.values = mu.atoms();
    map.jumps.resize(m - 1);
    for (Eigen::Index k = 0; k + 1 < m; ++k) map.jumps(k) = exp_quantile(mu.cumulative()(k));
    return map;
}

double modulus(const DiscreteMeasure& mu, double u) {
    if (!(u > 0.0)) throw std::domain_error("modulus: u must be positive");
    const Eigen::Index m = mu.size();
    if (m < 2) return 0.0;

    const VectorXd& a = mu.atoms();
    VectorXd s(m - 1);
    for (Eigen::Index k = 0; k + 1 < m; ++k) s(k) = exp_quantile(mu.cumulative()(k));

    // For each source plateau i, the largest reachable plateau j satisfies
    // s_{j-1} < s_i + u; j(i) is monotone in i.
    double best = 0.0;
    Eigen::Index j = 1;
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
        if (j < i + 1) j = i + 1;
        while (j + 1 < m && s(j) < s(i) + u) ++j;
        best = std::max(best, a(j) - a(i));
    }
    return best;
}

std::string ConvexOrderVerdict::describe() const {
    if (dominated) return "dominated";
    if (mean_mismatch) return "not dominated: mean mismatch";
    std::ostringstream os;
    os << "not dominated: witness t=" << witness_t;
    return os.str();
}

namespace {

double positive_part_integral(const DiscreteMeasure& nu, double t) {
    double s = 0.0;
    for (Eigen::Index i = nu.size() - 1; i >= 0; --i) {
        const double d = nu.atoms()(i) - t;
        if (d <= 0.0) break; // atoms sorted: earlier ones contribute nothing
        s += nu.weights()(i) * d;
    }
    return s;
}

} // namespace

ConvexOrderVerdict convex_order(const DiscreteMeasure& nu1, const DiscreteMeasure& nu2) {
    ConvexOrderVerdict v;
    if (std::abs(nu1.mean() - nu2.mean()) > tol::mean_equality) {
        v.mean_mismatch = true;
        return v;
    }
    // Both sides are convex piecewise linear in t, agree at t -> +-inf
    // (equal means), so the union of atoms is a sufficient test set.
    std::vector<double> ts(nu1.atoms().data(), nu1.atoms().data() + nu1.size());
    ts.insert(ts.end(), nu2.atoms().data(), nu2.atoms().data() + nu2.size());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (double t : ts) {
        if (positive_part_integral(nu1, t) >
            positive_part_integral(nu2, t) + tol::convex_order_slack) {
            v.witness_t = t;
            return v;
        }
    }
    v.dominated = true;
    return v;
}

std::string MajorizationVerdict::describe() const {
    if (majorized) return "majorized";
    if (sum_mismatch) return "not majorized: total sums differ";
    std::ostringstream os;
    os << "not majorized: suffix of length " << *violating_suffix << " violates";
    return os.str();
}

MajorizationVerdict majorize(const Eigen::Ref<const VectorXd>& a,
                             const Eigen::Ref<const VectorXd>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("majorize: length mismatch");
    MajorizationVerdict v;
    VectorXd sa = a;
    VectorXd sb = b;
    std::sort(sa.data(), sa.data() + sa.size());
    std::sort(sb.data(), sb.data() + sb.size());

    double suff_a = 0.0;
    double suff_b = 0.0;
    std::optional<Eigen::Index> bad;
    for (Eigen::Index k = sa.size() - 1; k >= 0; --k) {
        suff_a += sa(k);
        suff_b += sb(k);
        if (k > 0 && suff_a > suff_b + tol::suffix_sum && !bad) bad = sa.size() - k;
    }
    if (std::abs(suff_a - suff_b) > tol::mean_equality) {
        v.sum_mismatch = true;
        return v;
    }
    if (bad) {
        v.violating_suffix = bad;
        return v;
    }
    v.majorized = true;
    return v;
}

double relative_entropy(const DiscreteMeasure& nu, const DiscreteMeasure& mu) {
    double h = 0.0;
    Eigen::Index j = 0;
    for (Eigen::Index i = 0; i < nu.size(); ++i) {
        const double x = nu.atoms()(i);
        while (j < mu.size() && mu.atoms()(j) < x) ++j;
        if (j == mu.size() || mu.atoms()(j) != x)
            return std::numeric_limits<double>::infinity(); // not absolutely continuous
        h += nu.weights()(i) * std::log(nu.weights()(i) / mu.weights()(j));
    }
    return h;
}

DiscreteMeasure affine_pushforward(const DiscreteMeasure& mu, double scale, double offset) {
    if (!(scale > 0.0)) throw std::invalid_argument("affine_pushforward: scale must be positive");
    VectorXd atoms = scale * mu.atoms().array() + offset;
    return DiscreteMeasure(atoms, mu.weights());
}

} // namespace weakot
