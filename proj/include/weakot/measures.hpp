#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace weakot {

using Eigen::VectorXd;

/// Tolerances used by the verdict-producing operations. All absolute;
/// inputs are desk-scale by contract.
namespace tol {
inline constexpr double mean_equality = 1e-10;
inline constexpr double suffix_sum = 1e-12;
inline constexpr double convex_order_slack = 1e-12;
} // namespace tol

/**
@brief A probability measure on the real line with finitely many atoms.

Canonical form: atoms strictly increasing, weights positive and summing to
one. Duplicate input atoms are merged by summing their weights; weights are
renormalized at construction, so any positive weight vector is accepted.
*/
class DiscreteMeasure {
  public:
    /// Uniform weights over the given atoms (duplicates merged).
    explicit DiscreteMeasure(const Eigen::Ref<const VectorXd>& raw_atoms);

    DiscreteMeasure(const Eigen::Ref<const VectorXd>& raw_atoms,
                    const Eigen::Ref<const VectorXd>& raw_weights);

    static DiscreteMeasure dirac(double x);

    const VectorXd& atoms() const { return atoms_; }
    const VectorXd& weights() const { return weights_; }
    /// Cumulative weights W_1 < ... < W_m = 1 (the last entry is exactly 1).
    const VectorXd& cumulative() const { return cum_; }

    Eigen::Index size() const { return atoms_.size(); }
    bool is_dirac() const { return atoms_.size() == 1; }

    double mean() const { return atoms_.dot(weights_); }
    double min() const { return atoms_(0); }
    double max() const { return atoms_(atoms_.size() - 1); }

    /// F(x) = mu(-inf, x].
    double cdf(double x) const;

    /// Left-continuous generalized inverse F^{-1}(u) = inf{x : F(x) >= u},
    /// defined for u in (0, 1].
    double quantile(double u) const;

    /// F^{-1}(1/2); one canonical choice among the medians.
    double median() const { return quantile(0.5); }

  private:
    DiscreteMeasure() = default;
    VectorXd atoms_;
    VectorXd weights_;
    VectorXd cum_;
};

/**
@brief Left-continuous non-decreasing step map on the real line.

Plateau k has value values[k] and extends over (jumps[k-1], jumps[k]]; the
first plateau reaches -inf and the last +inf. Evaluation at a jump point
returns the left plateau (left continuity).
*/
struct TransportMap {
    VectorXd jumps;  ///< s_1 < ... < s_{m-1}
    VectorXd values; ///< plateau values a_1 < ... < a_m

    double operator()(double x) const;
};

/// Quantile of the symmetric exponential law tau(dx) = e^{-|x|}/2 dx:
/// log(2p) for p <= 1/2, -log(2(1-p)) for p > 1/2.
double exp_quantile(double p);

/// The map transporting tau onto mu: jumps at F_tau^{-1}(W_k), plateau
/// values at mu's atoms.
TransportMap u_map(const DiscreteMeasure& mu);

/**
@brief Modulus of continuity Delta_mu(u) = sup_x (U_mu(x+u) - U_mu(x)), u > 0.

Exact closed form from the step structure of U_mu: the supremum equals the
largest atom difference a_j - a_i over pairs with s_{j-1} - s_i < u (strict,
by left continuity). O(m) by a two-pointer sweep.
*/
double modulus(const DiscreteMeasure& mu, double u);

struct ConvexOrderVerdict {
    bool dominated = false;
    bool mean_mismatch = false;
    double witness_t = 0.0; ///< valid when !dominated && !mean_mismatch

    std::string describe() const;
};

/// nu1 <= nu2 in the convex order: equal means and
/// int [x-t]_+ dnu1 <= int [x-t]_+ dnu2 for every t. Both sides are
/// piecewise linear in t with breakpoints at the atoms, so checking the
/// union of supports is exhaustive.
ConvexOrderVerdict convex_order(const DiscreteMeasure& nu1, const DiscreteMeasure& nu2);

struct MajorizationVerdict {
    bool majorized = false;
    bool sum_mismatch = false;
    /// Suffix length whose sorted sum violates domination, when any.
    std::optional<Eigen::Index> violating_suffix;

    std::string describe() const;
};

/// Vector majorization: suffix sums of sorted a dominated by those of
/// sorted b, equal totals. Inputs may be unsorted; copies are sorted
/// internally.
MajorizationVerdict majorize(const Eigen::Ref<const VectorXd>& a,
                             const Eigen::Ref<const VectorXd>& b);

/// H(nu|mu) = sum nu_i log(nu_i/mu_i) when supp(nu) is contained in
/// supp(mu) (atom values compared exactly), +inf otherwise.
double relative_entropy(const DiscreteMeasure& nu, const DiscreteMeasure& mu);

/// Pushforward of mu under x -> scale*x + offset (scale > 0).
DiscreteMeasure affine_pushforward(const DiscreteMeasure& mu, double scale, double offset);

} // namespace weakot
