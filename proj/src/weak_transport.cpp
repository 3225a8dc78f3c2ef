#include "weakot/weak_transport.hpp"

#include "weakot/permutahedron.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace weakot {

double classical_cost(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                      const CostFunction& theta) {
    // Merge the cumulative grids; both quantile functions are constant on
    // each merged interval, so the integral is an exact finite sum.
    std::vector<double> grid(mu.cumulative().data(), mu.cumulative().data() + mu.size());
    grid.insert(grid.end(), nu.cumulative().data(), nu.cumulative().data() + nu.size());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double total = 0.0;
    double prev = 0.0;
    for (double u : grid) {
        total += (u - prev) * theta(std::abs(mu.quantile(u) - nu.quantile(u)));
        prev = u;
    }
    return total;
}

VectorXd refine_to_uniform(const DiscreteMeasure& mu, Eigen::Index n) {
    if (n <= 0) throw std::invalid_argument("refinement must be positive");
    VectorXd out(n);
    for (Eigen::Index k = 0; k < n; ++k)
        out(k) = mu.quantile((static_cast<double>(k) + 0.5) / static_cast<double>(n));
    return out;
}

namespace {

constexpr Eigen::Index kMaxAutoRefinement = 4096;
constexpr Eigen::Index kDefaultRefinement = 2048;

/// Smallest q <= qmax with w*q integral (within 1e-9*q), or 0 if none.
Eigen::Index small_denominator(double w, Eigen::Index qmax) {
    for (Eigen::Index q = 1; q <= qmax; ++q) {
        const double scaled = w * static_cast<double>(q);
        if (std::abs(scaled - std::round(scaled)) <= 1e-9 * static_cast<double>(q)) return q;
    }
    return 0;
}

Eigen::Index lcm_denominators(const DiscreteMeasure& mu, Eigen::Index acc) {
    for (Eigen::Index i = 0; i < mu.size() && acc != 0; ++i) {
        const Eigen::Index q = small_denominator(mu.weights()(i), kMaxAutoRefinement);
        if (q == 0) return 0;
        acc = std::lcm(acc, q);
        if (acc > kMaxAutoRefinement) return 0;
    }
    return acc;
}

} // namespace

Eigen::Index auto_refinement(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    Eigen::Index acc = lcm_denominators(mu, 1);
    if (acc != 0) acc = lcm_denominators(nu, acc);
    return acc == 0 ? kDefaultRefinement : acc;
}

WeakCostResult weak_cost(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                         const CostFunction& theta, std::optional<Eigen::Index> refinement) {
    if (refinement && *refinement <= 0)
        throw std::invalid_argument("weak_cost: refinement must be positive");
    const Eigen::Index n = refinement ? *refinement : auto_refinement(mu, nu);

    const VectorXd a = refine_to_uniform(mu, n);
    const VectorXd b = refine_to_uniform(nu, n);
    const ProjectionResult pr = project(a, b);

    double value = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) value += theta(std::abs(a(i) - pr.c_hat(i)));
    value /= static_cast<double>(n);

    return WeakCostResult{value, DiscreteMeasure(pr.c_hat), a, pr.c_hat, n};
}

AdditivityReport additivity_check(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                                  const CostFunction& theta1, const CostFunction& theta2,
                                  std::optional<Eigen::Index> refinement) {
    AdditivityReport rep;
    rep.lhs = weak_cost(nu, mu, CostFunction::sum(theta1, theta2), refinement).value;
    rep.rhs = weak_cost(nu, mu, theta1, refinement).value +
              weak_cost(nu, mu, theta2, refinement).value;
    rep.additive = std::abs(rep.lhs - rep.rhs) <= 1e-8 * (1.0 + rep.rhs);
    return rep;
}

RadoResult rado_decompose(const Eigen::Ref<const VectorXd>& a,
                          const Eigen::Ref<const VectorXd>& b) {
    const Eigen::Index n = a.size();
    if (b.size() != n) throw std::invalid_argument("rado: length mismatch");
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        if (a(i) > a(i + 1) || b(i) > b(i + 1))
            throw std::invalid_argument("rado: inputs must be sorted non-decreasing");
    if (!majorize(a, b).majorized)
        throw std::invalid_argument("rado: a is not majorized by b");

    // Work in descending coordinates: x is the target, y the evolving
    // vector, and column operations accumulate P_desc = T_1 T_2 ...
    VectorXd x = a.reverse();
    VectorXd y = b.reverse();
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
    const double eps = 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff());

    int steps = 0;
    for (Eigen::Index guard = 0; guard < n; ++guard) {
        Eigen::Index j = 0;
        while (j < n && std::abs(y(j) - x(j)) <= eps) ++j;
        if (j == n) break;
        // Positions above j are matched, so y_j overshoots x_j and some
        // later unmatched coordinate undershoots enough to absorb it.
        Eigen::Index k = j + 1;
        while (k < n && !(x(k) - y(k) > eps)) ++k;
        const double delta = y(j) - x(j);
        if (k == n && delta > 0.0 && delta <= 100.0 * eps) {
            // Round-off remainder with no partner left to absorb it.
            y(j) = x(j);
            continue;
        }
        if (delta <= 0.0 || k == n)
            throw std::logic_error("rado: majorization invariant broken");

        const double lambda = 1.0 - delta / (y(j) - y(k));
        y(k) += delta;
        y(j) = x(j);
        const VectorXd col_j = P.col(j);
        P.col(j) = lambda * col_j + (1.0 - lambda) * P.col(k);
        P.col(k) = (1.0 - lambda) * col_j + lambda * P.col(k);
        ++steps;
    }

    // Back to ascending indices on both sides.
    RadoResult result;
    result.P = P.reverse().eval();
    result.transforms = steps;
    return result;
}

namespace {

/// Maximal runs of equal values in a sorted vector: (first index, count).
std::vector<std::pair<Eigen::Index, Eigen::Index>> value_runs(const VectorXd& v) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> runs;
    for (Eigen::Index i = 0; i < v.size();) {
        Eigen::Index j = i;
        while (j < v.size() && v(j) == v(i)) ++j;
        runs.push_back({i, j - i});
        i = j;
    }
    return runs;
}

struct AggregatedKernel {
    VectorXd source_atoms, source_weights, target_atoms, target_weights;
    Eigen::MatrixXd rows;
};

/// Aggregate a refined column-kernel (column i of P = row for c[i]) onto
/// the distinct values of c and b by weight-averaging / summing.
AggregatedKernel aggregate(const VectorXd& c, const VectorXd& b, const Eigen::MatrixXd& P) {
    const auto src = value_runs(c);
    const auto tgt = value_runs(b);
    const auto n = static_cast<double>(c.size());

    AggregatedKernel out;
    out.source_atoms.resize(static_cast<Eigen::Index>(src.size()));
    out.source_weights.resize(static_cast<Eigen::Index>(src.size()));
    out.target_atoms.resize(static_cast<Eigen::Index>(tgt.size()));
    out.target_weights.resize(static_cast<Eigen::Index>(tgt.size()));
    out.rows.setZero(static_cast<Eigen::Index>(src.size()), static_cast<Eigen::Index>(tgt.size()));

    for (std::size_t t = 0; t < tgt.size(); ++t) {
        out.target_atoms(static_cast<Eigen::Index>(t)) = b(tgt[t].first);
        out.target_weights(static_cast<Eigen::Index>(t)) = static_cast<double>(tgt[t].second) / n;
    }
    for (std::size_t s = 0; s < src.size(); ++s) {
        out.source_atoms(static_cast<Eigen::Index>(s)) = c(src[s].first);
        out.source_weights(static_cast<Eigen::Index>(s)) = static_cast<double>(src[s].second) / n;
        for (Eigen::Index i = src[s].first; i < src[s].first + src[s].second; ++i)
            for (std::size_t t = 0; t < tgt.size(); ++t)
                for (Eigen::Index j = tgt[t].first; j < tgt[t].first + tgt[t].second; ++j)
                    out.rows(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) += P(j, i);
        out.rows.row(static_cast<Eigen::Index>(s)) /= static_cast<double>(src[s].second);
    }
    return out;
}

} // namespace

namespace {

// Kernel construction materializes an n x n matrix; keep that sane.
constexpr Eigen::Index kMaxKernelRefinement = 8192;

void check_kernel_refinement(Eigen::Index n) {
    if (n > kMaxKernelRefinement)
        throw std::invalid_argument("refinement too large for kernel construction");
}

} // namespace

MartingaleKernel strassen_kernel(const DiscreteMeasure& gamma, const DiscreteMeasure& nu,
                                 std::optional<Eigen::Index> refinement) {
    if (!convex_order(gamma, nu).dominated)
        throw std::invalid_argument("strassen_kernel: gamma is not dominated by nu");
    if (refinement && *refinement <= 0)
        throw std::invalid_argument("strassen_kernel: refinement must be positive");
    const Eigen::Index n = refinement ? *refinement : auto_refinement(gamma, nu);
    check_kernel_refinement(n);

    const VectorXd c = refine_to_uniform(gamma, n);
    const VectorXd b = refine_to_uniform(nu, n);
    const RadoResult rado = rado_decompose(c, b);

    AggregatedKernel agg = aggregate(c, b, rado.P);
    MartingaleKernel kernel;
    kernel.source_atoms = std::move(agg.source_atoms);
    kernel.source_weights = std::move(agg.source_weights);
    kernel.target_atoms = std::move(agg.target_atoms);
    kernel.target_weights = std::move(agg.target_weights);
    kernel.rows = std::move(agg.rows);
    kernel.refinement_n = n;
    return kernel;
}

WeakCoupling optimal_weak_coupling(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                                   const CostFunction& theta,
                                   std::optional<Eigen::Index> refinement) {
    if (refinement && *refinement <= 0)
        throw std::invalid_argument("optimal_weak_coupling: refinement must be positive");
    const Eigen::Index n = refinement ? *refinement : auto_refinement(mu, nu);
    check_kernel_refinement(n);

    const VectorXd a = refine_to_uniform(mu, n);
    const VectorXd b = refine_to_uniform(nu, n);
    const ProjectionResult pr = project(a, b);

    // c_hat ascends with a up to sub-ulp wobble on tied coordinates; rado
    // requires strict sortedness.
    VectorXd c_sorted = pr.c_hat;
    std::sort(c_sorted.data(), c_sorted.data() + n);
    const RadoResult rado = rado_decompose(c_sorted, b);
    const AggregatedKernel strassen = aggregate(c_sorted, b, rado.P);

    // Compose: the kernel row of a refined source index i is the Strassen
    // row of its barycenter c_hat_i; average the rows over each distinct
    // source atom.
    const auto src = value_runs(a);
    WeakCoupling coupling;
    coupling.refinement_n = n;
    coupling.target_atoms = strassen.target_atoms;
    coupling.target_weights = strassen.target_weights;
    coupling.source_atoms.resize(static_cast<Eigen::Index>(src.size()));
    coupling.source_weights.resize(static_cast<Eigen::Index>(src.size()));
    coupling.barycenters.resize(static_cast<Eigen::Index>(src.size()));
    coupling.rows.setZero(static_cast<Eigen::Index>(src.size()), strassen.target_atoms.size());

    for (std::size_t s = 0; s < src.size(); ++s) {
        const auto row = static_cast<Eigen::Index>(s);
        coupling.source_atoms(row) = a(src[s].first);
        coupling.source_weights(row) =
            static_cast<double>(src[s].second) / static_cast<double>(n);
        double bary = 0.0;
        for (Eigen::Index i = src[s].first; i < src[s].first + src[s].second; ++i) {
            const double value = pr.c_hat(i);
            // Locate the Strassen source row holding this barycenter value.
            const double* begin = strassen.source_atoms.data();
            const double* end = begin + strassen.source_atoms.size();
            const auto k = std::lower_bound(begin, end, value) - begin;
            coupling.rows.row(row) += strassen.rows.row(k);
            bary += value;
        }
        coupling.rows.row(row) /= static_cast<double>(src[s].second);
        coupling.barycenters(row) = bary / static_cast<double>(src[s].second);
    }

    double cost = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) cost += theta(std::abs(a(i) - pr.c_hat(i)));
    coupling.cost = cost / static_cast<double>(n);
    return coupling;
}

} // namespace weakot
