#pragma once

#include "weakot/measures.hpp"

#include <cstdint>
#include <vector>

namespace weakot {

/// Consecutive index range [begin, end) in the ascending sort order of a,
/// on which the residual a - c_hat is constant.
struct ResidualBlock {
    Eigen::Index begin = 0;
    Eigen::Index end = 0;
    double residual = 0.0;
};

/**
@brief Euclidean projection of a onto Perm(b) with its certificates.

c_hat keeps the coordinate order of the input a and is sorted like a
(a_i <= a_j implies c_hat_i <= c_hat_j). Blocks partition the ascending
sort positions; maximal runs of equal residual are merged, and residual
values are non-decreasing across ascending blocks (equivalently
non-increasing when a is presented in descending order).
*/
struct ProjectionResult {
    VectorXd c_hat;
    std::vector<ResidualBlock> blocks;
    double shift = 0.0; ///< mean correction (sum a - sum b)/n
};

/**
@brief Project a onto Perm(b) = {c : c majorized by b}.

Reduction: shift a onto the hyperplane of Perm(b) (the projection is
unchanged), sort descending, and fit the non-increasing isotonic
regression of (sorted a - sorted b) by pool-adjacent-violators; the
residual blocks instantiate the optimality partition. Satisfies the
variational inequality <a - c_hat, c - c_hat> <= 0 for all c in Perm(b).
*/
ProjectionResult project(const Eigen::Ref<const VectorXd>& a,
                         const Eigen::Ref<const VectorXd>& b);

/**
@brief Variational-inequality certificate over the vertices of Perm(b).

Checks <a - c_hat, b_sigma - c_hat> <= slack at every permutation sigma
when n <= 7, else at 10^4 seeded random permutations.
*/
bool check_variational(const Eigen::Ref<const VectorXd>& a, const ProjectionResult& result,
                       const Eigen::Ref<const VectorXd>& b, double slack = 1e-9,
                       std::uint64_t seed = 0x5eed);

/// a - c_hat majorized by a - c, for a caller-supplied c in Perm(b).
/// Throws if c is not in Perm(b).
bool residual_majorization(const Eigen::Ref<const VectorXd>& a, const ProjectionResult& result,
                           const Eigen::Ref<const VectorXd>& b,
                           const Eigen::Ref<const VectorXd>& c);

} // namespace weakot
