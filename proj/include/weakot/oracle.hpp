#pragma once

#include "weakot/costs.hpp"
#include "weakot/measures.hpp"

#include <cstdint>

namespace weakot {

struct OracleConfig {
    int max_iterations = 50000;
    double tolerance = 1e-8; ///< Frank-Wolfe gap target
    std::uint64_t seed = 0x5eed;
};

struct FwResult {
    VectorXd c_star;
    double value = 0.0;
    double gap = 0.0; ///< final Frank-Wolfe gap (certifies value - optimum <= gap)
    int iterations = 0;
    bool converged = false; ///< false when the iteration budget ran out first
};

/**
@brief Minimize (1/n) sum theta(|a_i - c_i|) over Perm(b) by Frank-Wolfe.

The linear minimization oracle over the permutahedron is exact sorting
(b's values assigned against the gradient order). Away steps with a
deterministic golden-section line search give the fast rate the gap
certificate needs; the gap, not the iterate, decides convergence.
*/
FwResult fw_minimize(const Eigen::Ref<const VectorXd>& a, const Eigen::Ref<const VectorXd>& b,
                     const CostFunction& theta, const OracleConfig& cfg = {});

/**
@brief Direct minimization of the kernel-space weak cost definition.

Supports of size <= 4 each. Coordinate descent along 2x2 transportation
loops (which preserve both marginals exactly) from grid^2 seeded random
starts plus the analytic start; the objective is convex in the kernel, so
any stationary point is global and the multi-start only guards bugs.
*/
double exhaustive_weak_cost(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                            const CostFunction& theta, int grid, const OracleConfig& cfg = {});

/// min over all n! vertex pairings of (1/n) sum theta(|a_i - b_sigma(i)|);
/// n <= 8.
double vertex_scan(const Eigen::Ref<const VectorXd>& a, const Eigen::Ref<const VectorXd>& b,
                   const CostFunction& theta);

} // namespace weakot
