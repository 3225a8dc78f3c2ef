#pragma once

#include "weakot/costs.hpp"
#include "weakot/measures.hpp"

#include <optional>

namespace weakot {

/**
@brief Result of the weak (barycentric) cost T-bar_theta(nu|mu).

Direction convention: mu is the first argument of the coupling kernel, the
barycenter target comes from nu; swap the arguments for the other
direction (the cost is not symmetric).

map_source/map_target hold the refined quantile vectors: the optimal
monotone map pairs map_source[i] -> map_target[i], and gamma_hat is the
uniform measure on map_target. The pairing (and hence gamma_hat) does not
depend on theta; only the reported value does.
*/
struct WeakCostResult {
    double value = 0.0;
    DiscreteMeasure gamma_hat;
    VectorXd map_source;
    VectorXd map_target;
    Eigen::Index refinement_n = 0;
};

/// Classical cost T_theta(nu, mu) by the quantile coupling, evaluated as
/// an exact finite sum over the common refinement of both cumulative grids.
double classical_cost(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                      const CostFunction& theta);

/// Quantiles of mu at the mid-levels (k - 1/2)/n, k = 1..n; exact when n is
/// a multiple of every weight denominator.
VectorXd refine_to_uniform(const DiscreteMeasure& mu, Eigen::Index n);

/// Common refinement size: the lcm of small rational weight denominators
/// of both measures when that stays <= 4096, else 2048.
Eigen::Index auto_refinement(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// T-bar_theta(nu|mu) via permutahedron projection of mu's refined
/// quantiles onto Perm(nu's refined quantiles). refinement: nullopt = auto.
WeakCostResult weak_cost(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                         const CostFunction& theta,
                         std::optional<Eigen::Index> refinement = std::nullopt);

struct AdditivityReport {
    double lhs = 0.0; ///< T-bar with theta1 + theta2
    double rhs = 0.0; ///< sum of the individual costs
    bool additive = false;
};

/// |T-bar_{theta1+theta2} - T-bar_{theta1} - T-bar_{theta2}| <= 1e-8*(1+rhs).
AdditivityReport additivity_check(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                                  const CostFunction& theta1, const CostFunction& theta2,
                                  std::optional<Eigen::Index> refinement = std::nullopt);

/// Doubly stochastic witness of a majorized-by b, with the number of
/// T-transforms used (at most n-1).
struct RadoResult {
    Eigen::MatrixXd P; ///< a = b * P, rows and columns sum to one
    int transforms = 0;
};

/**
@brief Constructive Rado decomposition: a = b P, P doubly stochastic.

P is a product of at most n-1 T-transforms (convex mixes of the identity
with a transposition). Pivot rule: each step fixes the largest
not-yet-matched coordinate, partnered with the largest unmatched
coordinate whose current value undershoots its target. Requires a and b
sorted non-decreasing and a majorized by b.
*/
RadoResult rado_decompose(const Eigen::Ref<const VectorXd>& a,
                          const Eigen::Ref<const VectorXd>& b);

/**
@brief Martingale (Strassen) kernel witnessing gamma convexly dominated by nu.

Row i lives on target_atoms and has barycenter source_atoms[i]; mixing the
rows with source_weights reproduces target_weights. Atoms are the distinct
values of the common uniform refinement (identical to the input atoms when
the refinement is exact).
*/
struct MartingaleKernel {
    VectorXd source_atoms;
    VectorXd source_weights;
    VectorXd target_atoms;
    VectorXd target_weights;
    Eigen::MatrixXd rows; ///< rows(i, j) = p(source i -> target j)
    Eigen::Index refinement_n = 0;

    VectorXd barycenters() const { return rows * target_atoms; }
    /// Mixed second marginal sum_i source_weights[i] * rows(i, .).
    VectorXd mixed_target() const { return rows.transpose() * source_weights; }
};

MartingaleKernel strassen_kernel(const DiscreteMeasure& gamma, const DiscreteMeasure& nu,
                                 std::optional<Eigen::Index> refinement = std::nullopt);

/**
@brief The optimal weak coupling pi(dx dy) = p(x, dy) mu(dx).

Rows are indexed by mu's atoms over nu's atoms; row i has barycenter
S(x_i) (the monotone map composed through the projection), the marginals
are mu and nu, and the barycentric cost equals weak_cost's value.
*/
struct WeakCoupling {
    VectorXd source_atoms;
    VectorXd source_weights;
    VectorXd target_atoms;
    VectorXd target_weights;
    Eigen::MatrixXd rows;
    VectorXd barycenters; ///< S(x_i) per source atom
    double cost = 0.0;
    Eigen::Index refinement_n = 0;

    VectorXd mixed_target() const { return rows.transpose() * source_weights; }
};

WeakCoupling optimal_weak_coupling(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                                   const CostFunction& theta,
                                   std::optional<Eigen::Index> refinement = std::nullopt);

} // namespace weakot
