#include "weakot/permutahedron.hpp"

#include "weakot/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace weakot {

namespace {

struct PavBlock {
    double sum;
    Eigen::Index count;
    double avg() const { return sum / static_cast<double>(count); }
};

/// Non-increasing isotonic regression, unit weights. Returns the merged
/// blocks in order; the fit is blockwise constant at the block average.
std::vector<PavBlock> pav_non_increasing(const VectorXd& r) {
    std::vector<PavBlock> blocks;
    blocks.reserve(static_cast<std::size_t>(r.size()));
    for (Eigen::Index k = 0; k < r.size(); ++k) {
        blocks.push_back({r(k), 1});
        while (blocks.size() >= 2 &&
               blocks[blocks.size() - 1].avg() > blocks[blocks.size() - 2].avg()) {
            blocks[blocks.size() - 2].sum += blocks.back().sum;
            blocks[blocks.size() - 2].count += blocks.back().count;
            blocks.pop_back();
        }
    }
    return blocks;
}

} // namespace

ProjectionResult project(const Eigen::Ref<const VectorXd>& a,
                         const Eigen::Ref<const VectorXd>& b) {
    const Eigen::Index n = a.size();
    if (b.size() != n) throw std::invalid_argument("project: length mismatch");
    if (n == 0) throw std::invalid_argument("project: empty input");

    ProjectionResult result;
    result.shift = (a.sum() - b.sum()) / static_cast<double>(n);

    // Descending sort order of a (the projection of the shifted point
    // coincides with the projection of a).
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index i, Eigen::Index j) { return a(i) > a(j); });

    VectorXd s(n); // shifted a, descending
    for (Eigen::Index k = 0; k < n; ++k) s(k) = a(order[static_cast<std::size_t>(k)]) - result.shift;
    VectorXd w = b; // descending
    std::sort(w.data(), w.data() + n, std::greater<double>());

    const std::vector<PavBlock> blocks = pav_non_increasing(s - w);

    // c = s - fit in descending positions, mapped back to input order.
    result.c_hat.resize(n);
    Eigen::Index pos = 0;
    for (const PavBlock& blk : blocks) {
        const double fit = blk.avg();
        for (Eigen::Index k = 0; k < blk.count; ++k, ++pos)
            result.c_hat(order[static_cast<std::size_t>(pos)]) = s(pos) - fit;
    }

    // Blocks in ascending positions, equal-residual runs merged. The
    // residual reported is against the original a: fit + shift.
    std::vector<ResidualBlock> asc;
    asc.reserve(blocks.size());
    Eigen::Index desc_begin = 0;
    for (const PavBlock& blk : blocks) {
        const Eigen::Index desc_end = desc_begin + blk.count;
        asc.push_back({n - desc_end, n - desc_begin, blk.avg() + result.shift});
        desc_begin = desc_end;
    }
    std::reverse(asc.begin(), asc.end());
    for (std::size_t k = 0; k < asc.size(); ++k) {
        if (!result.blocks.empty() && result.blocks.back().residual == asc[k].residual) {
            result.blocks.back().end = asc[k].end;
        } else {
            result.blocks.push_back(asc[k]);
        }
    }
    return result;
}

bool check_variational(const Eigen::Ref<const VectorXd>& a, const ProjectionResult& result,
                       const Eigen::Ref<const VectorXd>& b, double slack, std::uint64_t seed) {
    const Eigen::Index n = a.size();
    const VectorXd g = a - result.c_hat;
    const double bound = g.dot(result.c_hat) + slack;

    VectorXd perm = b;
    std::sort(perm.data(), perm.data() + n);
    if (n <= 7) {
        // std::next_permutation enumerates distinct arrangements of a
        // multiset, so ties in b cost nothing extra.
        do {
            if (g.dot(perm) > bound) return false;
        } while (std::next_permutation(perm.data(), perm.data() + n));
        return true;
    }
    Rng rng(seed);
    for (int trial = 0; trial < 10000; ++trial) {
        for (Eigen::Index k = n - 1; k > 0; --k)
            std::swap(perm(k), perm(rng.uniform_int(0, k)));
        if (g.dot(perm) > bound) return false;
    }
    return true;
}

bool residual_majorization(const Eigen::Ref<const VectorXd>& a, const ProjectionResult& result,
                           const Eigen::Ref<const VectorXd>& b,
                           const Eigen::Ref<const VectorXd>& c) {
    if (!majorize(c, b).majorized)
        throw std::invalid_argument("residual_majorization: c is not in Perm(b)");
    return majorize(a - result.c_hat, a - c).majorized;
}

} // namespace weakot
