// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned here, not configurable.

#include "weakot/inequalities.hpp"
#include "weakot/io.hpp"
#include "weakot/measures.hpp"
#include "weakot/oracle.hpp"
#include "weakot/permutahedron.hpp"
#include "weakot/rng.hpp"
#include "weakot/weak_transport.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace weakot;

namespace {

int g_failures = 0;

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2e", x);
    return buf;
}

void report(int id, const std::string& name, bool pass, double seconds,
            const std::string& detail = "") {
    std::printf("[%s] %2d %-24s %7.2fs%s%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                seconds, detail.empty() ? "" : "  ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run_timed(const std::function<bool(std::string&)>& body, int id, const std::string& name,
               double budget_seconds) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
        pass = false;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_seconds > 0.0 && elapsed > budget_seconds) {
        pass = false;
        detail += " (over " + std::to_string(budget_seconds) + "s budget)";
    }
    report(id, name, pass, elapsed, detail);
}

VectorXd random_sorted(Rng& rng, Eigen::Index n, double lo, double hi) {
    VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
    std::sort(v.data(), v.data() + n);
    return v;
}

VectorXd random_permutation(Rng& rng, const VectorXd& b) {
    VectorXd perm = b;
    for (Eigen::Index k = perm.size() - 1; k > 0; --k)
        std::swap(perm(k), perm(rng.uniform_int(0, k)));
    return perm;
}

VectorXd random_polytope_point(Rng& rng, const VectorXd& b, int vertices) {
    VectorXd c = VectorXd::Zero(b.size());
    double total = 0.0;
    for (int v = 0; v < vertices; ++v) {
        const double w = rng.exponential();
        c += w * random_permutation(rng, b);
        total += w;
    }
    return c / total;
}

struct SweepInstance {
    DiscreteMeasure mu;
    DiscreteMeasure nu;
    VectorXd a, b; // the refined uniform vectors (equal length)
};

std::vector<SweepInstance> make_sweep(std::uint64_t seed, int count, Eigen::Index max_n) {
    Rng rng(seed);
    std::vector<SweepInstance> sweep;
    sweep.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const auto n = static_cast<Eigen::Index>(rng.uniform_int(1, max_n));
        const VectorXd a = random_sorted(rng, n, -5.0, 5.0);
        const VectorXd b = random_sorted(rng, n, -5.0, 5.0);
        sweep.push_back({DiscreteMeasure(a), DiscreteMeasure(b), a, b});
    }
    return sweep;
}

// Criterion 1: the optimal coupling does not depend on the cost, and the
// reported values match an independent Frank-Wolfe minimization.
bool criterion_cost_independence(const std::vector<SweepInstance>& sweep, std::string& detail) {
    const CostFunction thetas[] = {CostFunction::power(1.5), CostFunction::power(2.0),
                                   CostFunction::quad_lin(1.0)};
    double worst_gamma = 0.0;
    double worst_value = 0.0;
    for (const SweepInstance& inst : sweep) {
        const WeakCostResult base = weak_cost(inst.nu, inst.mu, thetas[0]);
        for (const CostFunction& theta : thetas) {
            const WeakCostResult res = weak_cost(inst.nu, inst.mu, theta);
            worst_gamma = std::max(
                worst_gamma, (res.map_target - base.map_target).cwiseAbs().maxCoeff());
            if (res.refinement_n != base.refinement_n) return false;

            OracleConfig cfg;
            const FwResult fw = fw_minimize(inst.a, inst.b, theta, cfg);
            if (!fw.converged) return false;
            worst_value = std::max(worst_value, std::abs(fw.value - res.value));
        }
    }
    detail = "max gamma dev " + sci(worst_gamma) + ", max value dev " + sci(worst_value);
    return worst_gamma <= 1e-9 && worst_value <= 1e-6;
}

// Criterion 2: additivity of the weak cost over sums of convex costs.
bool criterion_additivity(const std::vector<SweepInstance>& sweep, std::string& detail) {
    const std::pair<CostFunction, CostFunction> pairs[] = {
        {CostFunction::power(2.0), CostFunction::power(1.0)},
        {CostFunction::power(1.5), CostFunction::quad_lin(1.0)},
    };
    double worst = 0.0;
    for (const SweepInstance& inst : sweep) {
        for (const auto& [t1, t2] : pairs) {
            const AdditivityReport rep = additivity_check(inst.nu, inst.mu, t1, t2);
            if (!rep.additive) return false;
            worst = std::max(worst, std::abs(rep.lhs - rep.rhs) / (1.0 + rep.rhs));
        }
    }
    detail = "max relative defect " + sci(worst);
    return true;
}

// Criterion 3: the projection satisfies the variational inequality on every
// vertex and majorizes every residual.
bool criterion_majorization(std::string& detail) {
    Rng rng(301);
    for (int k = 0; k < 500; ++k) {
        const auto n = static_cast<Eigen::Index>(rng.uniform_int(1, 6));
        const VectorXd a = random_sorted(rng, n, -5.0, 5.0);
        const VectorXd b = random_sorted(rng, n, -5.0, 5.0);
        const ProjectionResult pr = project(a, b);
        if (!check_variational(a, pr, b, 1e-9)) {
            detail = "variational inequality failed at instance " + std::to_string(k);
            return false;
        }
        for (int rep = 0; rep < 100; ++rep) {
            const VectorXd c = random_polytope_point(rng, b, 3);
            if (!residual_majorization(a, pr, b, c)) {
                detail = "residual majorization failed at instance " + std::to_string(k);
                return false;
            }
        }
    }
    detail = "500 instances, 100 polytope points each";
    return true;
}

// Criterion 4: kernel-space oracle, projection value, and constructed
// coupling agree on every 3-atom instance of the sweep.
bool criterion_sandwich(const std::vector<SweepInstance>& sweep, std::string& detail) {
    const CostFunction theta = CostFunction::power(2.0);
    double worst = 0.0;
    int used = 0;
    for (std::size_t k = 0; k < sweep.size(); ++k) {
        const SweepInstance& inst = sweep[k];
        if (inst.mu.size() != 3 || inst.nu.size() != 3) continue;
        ++used;
        const double projection = weak_cost(inst.nu, inst.mu, theta).value;
        const double coupling = optimal_weak_coupling(inst.nu, inst.mu, theta).cost;
        OracleConfig cfg;
        cfg.seed = 40000 + k;
        const double direct = exhaustive_weak_cost(inst.nu, inst.mu, theta, 4, cfg);
        worst = std::max({worst, std::abs(direct - projection), std::abs(coupling - projection)});
    }
    detail = std::to_string(used) + " three-atom instances, max deviation " + sci(worst);
    return used > 0 && worst <= 1e-5;
}

// Criterion 5: Rado decompositions and Strassen kernels satisfy their
// identities to 1e-10 with at most n-1 T-transforms.
bool criterion_rado_strassen(std::string& detail) {
    Rng rng(505);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
        const auto n = static_cast<Eigen::Index>(rng.uniform_int(1, 8));
        const VectorXd b = random_sorted(rng, n, -5.0, 5.0);
        VectorXd a = random_polytope_point(rng, b, 2);
        std::sort(a.data(), a.data() + n);

        const RadoResult rado = rado_decompose(a, b);
        if (rado.transforms > std::max<Eigen::Index>(0, n - 1)) {
            detail = "transform count exceeded n-1";
            return false;
        }
        worst = std::max(worst, (b.transpose() * rado.P - a.transpose()).cwiseAbs().maxCoeff());
        worst = std::max(worst,
                         (rado.P.rowwise().sum() - VectorXd::Ones(n)).cwiseAbs().maxCoeff());
        worst = std::max(worst, (rado.P.colwise().sum().transpose() - VectorXd::Ones(n))
                                    .cwiseAbs()
                                    .maxCoeff());

        const DiscreteMeasure gamma(a);
        const DiscreteMeasure nu(b);
        if (!convex_order(gamma, nu).dominated) continue;
        const MartingaleKernel kernel = strassen_kernel(gamma, nu);
        worst = std::max(worst,
                         (kernel.barycenters() - kernel.source_atoms).cwiseAbs().maxCoeff());
        worst = std::max(worst,
                         (kernel.mixed_target() - kernel.target_weights).cwiseAbs().maxCoeff());
        worst = std::max(
            worst, (kernel.rows.rowwise().sum() - VectorXd::Ones(kernel.rows.rows()))
                       .cwiseAbs()
                       .maxCoeff());
    }
    detail = "max identity error " + sci(worst);
    return worst <= 1e-10;
}

// Criterion 6: Jensen domination with the strict-gap witness.
bool criterion_jensen(const std::vector<SweepInstance>& sweep, std::string& detail) {
    const CostFunction thetas[] = {CostFunction::power(1.5), CostFunction::power(2.0),
                                   CostFunction::quad_lin(1.0)};
    for (const SweepInstance& inst : sweep) {
        for (const CostFunction& theta : thetas) {
            if (weak_cost(inst.nu, inst.mu, theta).value >
                classical_cost(inst.nu, inst.mu, theta) + 1e-12)
                return false;
        }
    }
    // The strict gap: a point mass against the symmetric pair.
    const DiscreteMeasure delta0 = DiscreteMeasure::dirac(0.0);
    VectorXd pm(2);
    pm << -1.0, 1.0;
    const DiscreteMeasure nu(pm);
    const double weak = weak_cost(nu, delta0, CostFunction::power(2.0)).value;
    const double classical = classical_cost(nu, delta0, CostFunction::power(2.0));
    detail = "witness weak=" + std::to_string(weak) + " classical=" + std::to_string(classical);
    return weak == 0.0 && classical == 1.0;
}

// Criterion 7: the modulus condition implies both transport-entropy
// inequalities with a = kappa2 * b.
bool criterion_entropy(std::string& detail) {
    const CostFunction theta = CostFunction::power(2.0);
    std::vector<DiscreteMeasure> measures;
    for (double p : {0.2, 0.5, 0.8}) {
        VectorXd atoms(2), weights(2);
        atoms << 0.0, 1.0;
        weights << 1.0 - p, p;
        measures.emplace_back(atoms, weights);
    }
    for (int k = 1; k <= 5; ++k)
        measures.emplace_back(VectorXd::LinSpaced(k + 1, 0.0, static_cast<double>(k)));

    double min_slack = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 700;
    for (const DiscreteMeasure& mu : measures) {
        const ProbeResult res = entropy_inequality_probe(mu, theta, 1.0, 200, seed++);
        min_slack = std::min(min_slack, res.min_slack);
    }
    detail = "min slack " + sci(min_slack);
    return min_slack >= -1e-9;
}

// Criterion 8: the discrete log-Sobolev inequality for the exponential law.
bool criterion_log_sobolev(std::string& detail) {
    constexpr double kCap = 0.070710678118654752;
    Rng rng(808);
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 50; ++k) {
        std::vector<double> positions;
        std::vector<double> heights;
        double x = rng.uniform(-10.0, -8.0);
        while (x < 10.0) {
            positions.push_back(x);
            heights.push_back(rng.uniform(0.0, kCap));
            x += 1.0 + rng.exponential();
        }
        const auto f = [&positions, &heights](double t) {
            double v = 0.0;
            for (std::size_t j = 0; j < positions.size() && positions[j] <= t; ++j)
                v += heights[j];
            return v;
        };
        const StepDirection dir = k % 2 == 0 ? StepDirection::backward : StepDirection::forward;
        const LogSobolevResult res = log_sobolev_check(f, dir);
        worst = std::max(worst, res.lhs - res.rhs);
        if (!res.holds) {
            detail = "violated at seed index " + std::to_string(k);
            return false;
        }
    }
    // Hypothesis gate: increments of 0.1 must be rejected.
    bool rejected = false;
    try {
        log_sobolev_check([](double t) { return 0.1 * std::clamp(t, -5.0, 5.0); },
                          StepDirection::backward);
    } catch (const std::invalid_argument&) {
        rejected = true;
    }
    detail = "50 admissible functions, worst lhs-rhs " + sci(worst) +
             (rejected ? ", gate rejects 0.1" : ", GATE FAILED");
    return rejected;
}

// Criterion 9: the closed-form modulus equals a dense-grid evaluation of
// sup_x (U(x+u) - U(x)) within one grid cell of resolution.
bool criterion_modulus(std::string& detail) {
    const char* files[] = {"bernoulli_half.json", "uniform012.json", "quarter.json"};
    const int grid_points = 1000000;
    for (const char* file : files) {
        const DiscreteMeasure mu = load_measure(std::string(WEAKOT_DATA_DIR "/") + file);
        const TransportMap U = u_map(mu);
        const double lo = -35.0;
        const double hi = 30.0;
        const double cell = (hi - lo) / static_cast<double>(grid_points);
        for (double u : {0.05, 0.3, 0.7, 0.81, 1.0, 1.5, 3.0}) {
            double grid_sup = 0.0;
            for (int k = 0; k <= grid_points; ++k) {
                const double x = lo + cell * static_cast<double>(k);
                grid_sup = std::max(grid_sup, U(x + u) - U(x));
            }
            const double exact = modulus(mu, u);
            const double exact_minus = modulus(mu, std::max(u - cell, u * 0.5));
            if (!(grid_sup <= exact && grid_sup >= exact_minus)) {
                detail = std::string(file) + " at u=" + std::to_string(u);
                return false;
            }
        }
    }
    detail = "3 measures x 7 offsets on a 1e6-point grid";
    return true;
}

// Criterion 10: weak duality after the orientation regression.
bool criterion_duality(std::string& detail) {
    const CostFunction theta = CostFunction::power(2.0);

    // Mandatory regression: the tent potential overshoots Tbar(nu|mu) = 0
    // but must sit below Tbar(mu|nu) = 1.
    {
        const DiscreteMeasure mu = DiscreteMeasure::dirac(0.0);
        VectorXd pm(2);
        pm << -1.0, 1.0;
        const DiscreteMeasure nu(pm);
        VectorXd xs(3), vs(3);
        xs << -1.0, 0.0, 1.0;
        vs << 1.0, 0.0, 1.0;
        const ConvexPiecewiseLinear tent(xs, vs, -2.0, 2.0);
        const double gap = dual_gap(nu, mu, theta, {tent});
        if (!(gap <= 1e-8 && gap < -0.2)) {
            detail = "orientation regression failed, gap " + std::to_string(gap);
            return false;
        }
    }

    Rng rng(1010);
    double worst = -std::numeric_limits<double>::infinity();
    for (int inst = 0; inst < 20; ++inst) {
        const auto n = static_cast<Eigen::Index>(rng.uniform_int(1, 6));
        const auto m = static_cast<Eigen::Index>(rng.uniform_int(1, 6));
        VectorXd xa(n), wa(n), xb(m), wb(m);
        for (Eigen::Index i = 0; i < n; ++i) xa(i) = rng.uniform(-4.0, 4.0);
        for (Eigen::Index i = 0; i < n; ++i) wa(i) = rng.exponential();
        for (Eigen::Index i = 0; i < m; ++i) xb(i) = rng.uniform(-4.0, 4.0);
        for (Eigen::Index i = 0; i < m; ++i) wb(i) = rng.exponential();
        const DiscreteMeasure nu(xa, wa);
        const DiscreteMeasure mu(xb, wb);

        std::vector<ConvexPiecewiseLinear> potentials;
        for (int k = 0; k < 100; ++k) {
            const auto breaks = static_cast<Eigen::Index>(rng.uniform_int(1, 4));
            VectorXd xs(breaks), vs(breaks);
            for (Eigen::Index i = 0; i < breaks; ++i) xs(i) = rng.uniform(-4.0, 4.0);
            std::sort(xs.data(), xs.data() + breaks);
            for (Eigen::Index i = 0; i + 1 < breaks; ++i)
                if (xs(i + 1) - xs(i) < 1e-6) xs(i + 1) = xs(i) + 1e-6;
            const double left = -rng.exponential();
            const double right = rng.exponential();
            VectorXd slopes(breaks - 1);
            for (Eigen::Index i = 0; i + 1 < breaks; ++i) slopes(i) = rng.uniform(left, right);
            std::sort(slopes.data(), slopes.data() + slopes.size());
            vs(0) = rng.uniform(-1.0, 1.0);
            for (Eigen::Index i = 0; i + 1 < breaks; ++i)
                vs(i + 1) = vs(i) + slopes(i) * (xs(i + 1) - xs(i));
            potentials.emplace_back(xs, vs, left, right);
        }
        worst = std::max(worst, dual_gap(nu, mu, theta, potentials));
        if (worst > 1e-8) {
            detail = "gap " + std::to_string(worst) + " at instance " + std::to_string(inst);
            return false;
        }
    }
    detail = "worst gap " + sci(worst);
    return true;
}

} // namespace

int main() {
    std::printf("weakot acceptance suite\n");

    const std::vector<SweepInstance> sweep = make_sweep(100, 1000, 8);

    run_timed([&](std::string& d) { return criterion_cost_independence(sweep, d); }, 1,
              "cost-independence", 60.0);
    run_timed([&](std::string& d) { return criterion_additivity(sweep, d); }, 2, "additivity",
              0.0);
    run_timed([&](std::string& d) { return criterion_majorization(d); }, 3,
              "majorization-theorem", 0.0);
    run_timed([&](std::string& d) { return criterion_sandwich(sweep, d); }, 4, "sandwich", 0.0);
    run_timed([&](std::string& d) { return criterion_rado_strassen(d); }, 5, "rado-strassen",
              20.0);
    run_timed([&](std::string& d) { return criterion_jensen(sweep, d); }, 6,
              "jensen-domination", 0.0);
    run_timed([&](std::string& d) { return criterion_entropy(d); }, 7, "entropy-inequality",
              120.0);
    run_timed([&](std::string& d) { return criterion_log_sobolev(d); }, 8, "log-sobolev", 30.0);
    run_timed([&](std::string& d) { return criterion_modulus(d); }, 9, "modulus-exactness",
              0.0);
    run_timed([&](std::string& d) { return criterion_duality(d); }, 10, "weak-duality", 0.0);

    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
