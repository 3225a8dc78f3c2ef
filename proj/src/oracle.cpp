#include "weakot/oracle.hpp"

#include "weakot/rng.hpp"
#include "weakot/weak_transport.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace weakot {

namespace {

/// Golden-section minimizer of a convex phi on [lo, hi]; deterministic.
template <typename F> double golden_min(const F& phi, double lo, double hi, int iters = 80) {
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
    return 0.5 * (lo + hi);
}

using PermKey = std::vector<int>; // coordinate -> index into sorted b

VectorXd vertex_values(const PermKey& key, const VectorXd& b_sorted) {
    VectorXd v(b_sorted.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = b_sorted(key[static_cast<std::size_t>(i)]);
    return v;
}

} // namespace

FwResult fw_minimize(const Eigen::Ref<const VectorXd>& a, const Eigen::Ref<const VectorXd>& b,
                     const CostFunction& theta, const OracleConfig& cfg) {
    const Eigen::Index n = a.size();
    if (b.size() != n) throw std::invalid_argument("fw_minimize: length mismatch");
    if (cfg.max_iterations <= 0 || !(cfg.tolerance > 0.0))
        throw std::invalid_argument("fw_minimize: invalid config");
    const double inv_n = 1.0 / static_cast<double>(n);

    VectorXd b_sorted = b;
    std::sort(b_sorted.data(), b_sorted.data() + n);

    const auto objective = [&](const VectorXd& c) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += theta(std::abs(a(i) - c(i)));
        return s * inv_n;
    };
    const auto gradient = [&](const VectorXd& c, VectorXd& g) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = a(i) - c(i);
            if (d == 0.0) {
                g(i) = 0.0;
            } else {
                const double slope = theta.deriv_right(std::abs(d)) * inv_n;
                g(i) = d > 0.0 ? -slope : slope;
            }
        }
    };
    // LMO: the largest gradient coordinate receives the smallest b value.
    const auto lmo = [&](const VectorXd& g) {
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int i, int j) { return g(i) > g(j); });
        PermKey key(static_cast<std::size_t>(n));
        for (Eigen::Index r = 0; r < n; ++r) key[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = static_cast<int>(r);
        return key;
    };

    // Start at the monotone vertex (sorted pairing with a).
    PermKey start(static_cast<std::size_t>(n));
    {
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int i, int j) { return a(i) < a(j); });
        for (Eigen::Index r = 0; r < n; ++r) start[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = static_cast<int>(r);
    }
    std::map<PermKey, double> active;
    active[start] = 1.0;
    VectorXd c = vertex_values(start, b_sorted);

    FwResult result;
    VectorXd g(n);
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        gradient(c, g);
        const PermKey fw_key = lmo(g);
        const VectorXd v_fw = vertex_values(fw_key, b_sorted);
        const double fw_gap = g.dot(c - v_fw);
        result.iterations = iter;
        result.gap = fw_gap;
        if (fw_gap <= cfg.tolerance) {
            result.converged = true;
            break;
        }

        // Away vertex: the active atom most aligned with the gradient.
        auto away_it = active.begin();
        double away_score = -std::numeric_limits<double>::infinity();
        for (auto it = active.begin(); it != active.end(); ++it) {
            const double s = g.dot(vertex_values(it->first, b_sorted));
            if (s > away_score) {
                away_score = s;
                away_it = it;
            }
        }
        const double away_gap = away_score - g.dot(c);

        bool fw_step = fw_gap >= away_gap || active.size() == 1;
        VectorXd dir;
        double gamma_max = 0.0;
        if (fw_step) {
            dir = v_fw - c;
            gamma_max = 1.0;
        } else {
            const double alpha = away_it->second;
            if (1.0 - alpha < 1e-15) {
                dir = v_fw - c;
                gamma_max = 1.0;
                fw_step = true;
            } else {
                dir = c - vertex_values(away_it->first, b_sorted);
                gamma_max = alpha / (1.0 - alpha);
            }
        }
        if (dir.lpNorm<Eigen::Infinity>() == 0.0) {
            result.converged = true;
            break;
        }

        // Line search by bisection on the (monotone) right derivative of
        // phi(t) = f(c + t dir); resolves the argmin to machine precision,
        // which the gap certificate needs.
        const auto dphi = [&](double t) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double r = a(i) - c(i) - t * dir(i);
                if (r == 0.0) {
                    s += std::abs(dir(i)) * theta.deriv_right(0.0);
                } else {
                    s -= dir(i) * (r > 0.0 ? 1.0 : -1.0) * theta.deriv_right(std::abs(r));
                }
            }
            return s * inv_n;
        };
        double gamma = gamma_max;
        if (dphi(gamma_max) > 0.0) {
            double lo = 0.0;
            double hi = gamma_max;
            for (int it = 0; it < 90; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (dphi(mid) < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            gamma = 0.5 * (lo + hi);
        }
        if (gamma <= 0.0) continue;

        if (fw_step) {
            for (auto& [key, w] : active) w *= (1.0 - gamma);
            active[fw_key] += gamma;
        } else {
            for (auto& [key, w] : active) w *= (1.0 + gamma);
            away_it->second -= gamma;
        }
        for (auto it = active.begin(); it != active.end();) {
            if (it->second <= 1e-15) {
                it = active.erase(it);
            } else {
                ++it;
            }
        }

        // Recompute c from the active set to stop drift; renormalize weights.
        double total = 0.0;
        for (const auto& [key, w] : active) total += w;
        c.setZero();
        for (auto& [key, w] : active) {
            w /= total;
            c += w * vertex_values(key, b_sorted);
        }
    }

    result.c_star = c;
    result.value = objective(c);
    return result;
}

double vertex_scan(const Eigen::Ref<const VectorXd>& a, const Eigen::Ref<const VectorXd>& b,
                   const CostFunction& theta) {
    const Eigen::Index n = a.size();
    if (b.size() != n) throw std::invalid_argument("vertex_scan: length mismatch");
    if (n > 8) throw std::invalid_argument("vertex_scan: n must be <= 8");

    VectorXd perm = b;
    std::sort(perm.data(), perm.data() + n);
    double best = std::numeric_limits<double>::infinity();
    do {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += theta(std::abs(a(i) - perm(i)));
        best = std::min(best, s / static_cast<double>(n));
    } while (std::next_permutation(perm.data(), perm.data() + n));
    return best;
}

namespace {

struct TransportLoop {
    Eigen::Index i1, i2, j1, j2;
};

double kernel_objective(const Eigen::MatrixXd& pi, const VectorXd& x, const VectorXd& w,
                        const VectorXd& y, const CostFunction& theta) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double bary = pi.row(i).dot(y) / w(i);
        total += w(i) * theta(std::abs(x(i) - bary));
    }
    return total;
}

/// Cyclic exact 1-D minimization along every 2x2 loop until a full pass
/// stops improving. Loop moves keep both marginals exact.
double descend(Eigen::MatrixXd& pi, const VectorXd& x, const VectorXd& w, const VectorXd& y,
               const CostFunction& theta, const std::vector<TransportLoop>& loops) {
    double value = kernel_objective(pi, x, w, y, theta);
    for (int pass = 0; pass < 300; ++pass) {
        double improved = 0.0;
        for (const TransportLoop& lp : loops) {
            const double t_hi = std::min(pi(lp.i1, lp.j2), pi(lp.i2, lp.j1));
            const double t_lo = -std::min(pi(lp.i1, lp.j1), pi(lp.i2, lp.j2));
            if (t_hi - t_lo <= 0.0) continue;
            const auto phi = [&](double t) {
                Eigen::MatrixXd cand = pi;
                cand(lp.i1, lp.j1) += t;
                cand(lp.i2, lp.j2) += t;
                cand(lp.i1, lp.j2) -= t;
                cand(lp.i2, lp.j1) -= t;
                return kernel_objective(cand, x, w, y, theta);
            };
            double t = golden_min(phi, t_lo, t_hi, 60);
            double ft = phi(t);
            if (phi(0.0) <= ft) continue;
            pi(lp.i1, lp.j1) += t;
            pi(lp.i2, lp.j2) += t;
            pi(lp.i1, lp.j2) -= t;
            pi(lp.i2, lp.j1) -= t;
            improved += value - ft;
            value = ft;
        }
        if (improved <= 1e-13 * (1.0 + std::abs(value))) break;
    }
    return value;
}

} // namespace

double exhaustive_weak_cost(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                            const CostFunction& theta, int grid, const OracleConfig& cfg) {
    if (mu.size() > 4 || nu.size() > 4)
        throw std::invalid_argument("exhaustive_weak_cost: supports must have <= 4 atoms");
    if (grid < 0 || grid > 64) throw std::invalid_argument("exhaustive_weak_cost: grid must be in [0, 64]");

    const VectorXd& x = mu.atoms();
    const VectorXd& w = mu.weights();
    const VectorXd& y = nu.atoms();
    const VectorXd& v = nu.weights();

    std::vector<TransportLoop> loops;
    for (Eigen::Index i1 = 0; i1 < x.size(); ++i1)
        for (Eigen::Index i2 = i1 + 1; i2 < x.size(); ++i2)
            for (Eigen::Index j1 = 0; j1 < y.size(); ++j1)
                for (Eigen::Index j2 = j1 + 1; j2 < y.size(); ++j2)
                    loops.push_back({i1, i2, j1, j2});

    const Eigen::MatrixXd independence = w * v.transpose();
    double best = std::numeric_limits<double>::infinity();

    // Analytic start: the constructed optimal coupling.
    if (loops.empty()) {
        // Single row or single column: the coupling is forced.
        Eigen::MatrixXd pi = independence;
        return kernel_objective(pi, x, w, y, theta);
    }
    {
        const WeakCoupling coupling = optimal_weak_coupling(nu, mu, theta);
        if (coupling.source_atoms.size() == x.size() &&
            coupling.target_atoms.size() == y.size()) {
            Eigen::MatrixXd pi =
                coupling.source_weights.asDiagonal() * coupling.rows;
            Eigen::MatrixXd start = pi;
            best = std::min(best, descend(start, x, w, y, theta, loops));
        }
    }
    {
        Eigen::MatrixXd pi = independence;
        best = std::min(best, descend(pi, x, w, y, theta, loops));
    }

    Rng rng(cfg.seed);
    const int starts = grid * grid;
    for (int s = 0; s < starts; ++s) {
        Eigen::MatrixXd pi = independence;
        for (int kick = 0; kick < 50; ++kick) {
            const TransportLoop& lp = loops[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<long>(loops.size()) - 1))];
            const double t_hi = std::min(pi(lp.i1, lp.j2), pi(lp.i2, lp.j1));
            const double t_lo = -std::min(pi(lp.i1, lp.j1), pi(lp.i2, lp.j2));
            const double t = rng.uniform(t_lo, t_hi);
            pi(lp.i1, lp.j1) += t;
            pi(lp.i2, lp.j2) += t;
            pi(lp.i1, lp.j2) -= t;
            pi(lp.i2, lp.j1) -= t;
        }
        best = std::min(best, descend(pi, x, w, y, theta, loops));
    }
    return best;
}

} // namespace weakot
