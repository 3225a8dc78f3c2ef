#include "weakot/inequalities.hpp"
#include "weakot/io.hpp"
#include "weakot/measures.hpp"
#include "weakot/oracle.hpp"
#include "weakot/permutahedron.hpp"
#include "weakot/rng.hpp"
#include "weakot/weak_transport.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

using nlohmann::json;
using namespace weakot;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitVerification = 3;

struct VerificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Stopwatch {
  public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Options {
    bool as_json = false;
    std::string theta_spec;
    std::string mu_arg, nu_arg, a_arg, b_arg;
    std::optional<long> refine;
    bool swap = false;
    double t0 = 1.0;
    int trials = 200;
    std::uint64_t seed = 0;
    int instances = 100;
};

void emit(const json& report, bool as_json, const std::string& human) {
    if (as_json) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << human;
    }
}

std::string verdict_str(bool ok) { return ok ? "true" : "false"; }

std::optional<Eigen::Index> refinement_of(const Options& opt) {
    if (!opt.refine) return std::nullopt;
    return static_cast<Eigen::Index>(*opt.refine);
}

// ---------------------------------------------------------------- commands

int run_cost(const Options& opt) {
    Stopwatch watch;
    const DiscreteMeasure mu = load_measure(opt.mu_arg);
    const DiscreteMeasure nu = load_measure(opt.nu_arg);
    const CostFunction theta = parse_theta(opt.theta_spec);
    const double value = classical_cost(nu, mu, theta);

    json report{{"command", "cost"},
                {"inputs",
                 {{"theta", theta.spec()},
                  {"mu", measure_to_json(mu)},
                  {"nu", measure_to_json(nu)}}},
                {"value", value},
                {"wall_time_ms", watch.ms()}};
    std::ostringstream os;
    os << "T_theta(nu, mu) = " << value << "\n";
    emit(report, opt.as_json, os.str());
    return kExitOk;
}

int run_weak_cost(const Options& opt) {
    Stopwatch watch;
    DiscreteMeasure mu = load_measure(opt.mu_arg);
    DiscreteMeasure nu = load_measure(opt.nu_arg);
    if (opt.swap) std::swap(mu, nu);
    const CostFunction theta = parse_theta(opt.theta_spec);
    const WeakCostResult res = weak_cost(nu, mu, theta, refinement_of(opt));

    json report{{"command", "weak-cost"},
                {"inputs",
                 {{"theta", theta.spec()},
                  {"mu", measure_to_json(mu)},
                  {"nu", measure_to_json(nu)},
                  {"swap", opt.swap}}},
                {"value", res.value},
                {"gamma_hat", measure_to_json(res.gamma_hat)},
                {"refinement_n", res.refinement_n},
                {"wall_time_ms", watch.ms()}};
    std::ostringstream os;
    os << "Tbar_theta(nu|mu) = " << res.value << "  (refinement n=" << res.refinement_n
       << ")\n"
       << "gamma_hat atoms: " << res.gamma_hat.size() << "\n";
    emit(report, opt.as_json, os.str());
    return kExitOk;
}

int run_project(const Options& opt) {
    Stopwatch watch;
    const VectorXd a = load_vector(opt.a_arg);
    const VectorXd b = load_vector(opt.b_arg);
    const ProjectionResult pr = project(a, b);
    const bool variational = check_variational(a, pr, b);
    const bool inside = majorize(pr.c_hat, b).majorized;

    json blocks = json::array();
    for (const ResidualBlock& blk : pr.blocks)
        blocks.push_back({{"begin", blk.begin}, {"end", blk.end}, {"residual", blk.residual}});
    json report{{"command", "project"},
                {"inputs", {{"a", vector_to_json(a)}, {"b", vector_to_json(b)}}},
                {"c_hat", vector_to_json(pr.c_hat)},
                {"shift", pr.shift},
                {"blocks", blocks},
                {"verdicts",
                 {{"variational_inequality", variational}, {"c_hat_in_perm_b", inside}}},
                {"wall_time_ms", watch.ms()}};
    std::ostringstream os;
    os << "c_hat = [";
    for (Eigen::Index i = 0; i < pr.c_hat.size(); ++i)
        os << (i ? ", " : "") << pr.c_hat(i);
    os << "]\nshift = " << pr.shift << ", blocks = " << pr.blocks.size()
       << "\nvariational inequality: " << verdict_str(variational) << "\n";
    emit(report, opt.as_json, os.str());
    return kExitOk;
}

int run_order(const Options& opt) {
    Stopwatch watch;
    const DiscreteMeasure nu1 = load_measure(opt.a_arg);
    const DiscreteMeasure nu2 = load_measure(opt.b_arg);
    const ConvexOrderVerdict v = convex_order(nu1, nu2);

    json report{{"command", "order"},
                {"inputs", {{"nu1", measure_to_json(nu1)}, {"nu2", measure_to_json(nu2)}}},
                {"dominated", v.dominated},
                {"mean_mismatch", v.mean_mismatch},
                {"wall_time_ms", watch.ms()}};
    if (!v.dominated && !v.mean_mismatch) report["witness_t"] = v.witness_t;
    emit(report, opt.as_json, v.describe() + "\n");
    return kExitOk;
}

int run_majorize(const Options& opt) {
    Stopwatch watch;
    const VectorXd a = load_vector(opt.a_arg);
    const VectorXd b = load_vector(opt.b_arg);
    const MajorizationVerdict v = majorize(a, b);

    json report{{"command", "majorize"},
                {"inputs", {{"a", vector_to_json(a)}, {"b", vector_to_json(b)}}},
                {"majorized", v.majorized},
                {"sum_mismatch", v.sum_mismatch},
                {"wall_time_ms", watch.ms()}};
    if (v.violating_suffix) report["violating_suffix"] = *v.violating_suffix;
    emit(report, opt.as_json, v.describe() + "\n");
    return kExitOk;
}

int run_rado(const Options& opt) {
    Stopwatch watch;
    const VectorXd a = load_vector(opt.a_arg);
    const VectorXd b = load_vector(opt.b_arg);
    const RadoResult res = rado_decompose(a, b);
    const double err = (b.transpose() * res.P - a.transpose()).cwiseAbs().maxCoeff();

    json report{{"command", "rado"},
                {"inputs", {{"a", vector_to_json(a)}, {"b", vector_to_json(b)}}},
                {"P", matrix_to_json(res.P)},
                {"t_transforms", res.transforms},
                {"max_error", err},
                {"wall_time_ms", watch.ms()}};
    std::ostringstream os;
    os << "doubly stochastic P with a = bP (max error " << err << ", " << res.transforms
       << " T-transforms)\n";
    emit(report, opt.as_json, os.str());
    return kExitOk;
}

int run_couple(const Options& opt) {
    Stopwatch watch;
    const DiscreteMeasure mu = load_measure(opt.mu_arg);
    const DiscreteMeasure nu = load_measure(opt.nu_arg);
    const CostFunction theta = parse_theta(opt.theta_spec);
    const WeakCoupling coupling = optimal_weak_coupling(nu, mu, theta, refinement_of(opt));

    const double marginal_err =
        (coupling.mixed_target() - coupling.target_weights).cwiseAbs().maxCoeff();
    json report{{"command", "couple"},
                {"inputs",
                 {{"theta", theta.spec()},
                  {"mu", measure_to_json(mu)},
                  {"nu", measure_to_json(nu)}}},
                {"source_atoms", vector_to_json(coupling.source_atoms)},
                {"source_weights", vector_to_json(coupling.source_weights)},
                {"target_atoms", vector_to_json(coupling.target_atoms)},
                {"target_weights", vector_to_json(coupling.target_weights)},
                {"rows", matrix_to_json(coupling.rows)},
                {"barycenters", vector_to_json(coupling.barycenters)},
                {"cost", coupling.cost},
                {"refinement_n", coupling.refinement_n},
                {"second_marginal_error", marginal_err},
                {"wall_time_ms", watch.ms()}};
    std::ostringstream os;
    os << "coupling rows: " << coupling.rows.rows() << " x " << coupling.rows.cols()
       << ", barycentric cost " << coupling.cost << " (refinement n=" << coupling.refinement_n
       << ")\n";
    emit(report, opt.as_json, os.str());
    return kExitOk;
}

int run_diagnose(const Options& opt) {
    Stopwatch watch;
    const DiscreteMeasure mu = load_measure(opt.mu_arg);
    const CostFunction theta = parse_theta(opt.theta_spec);
    const DiagnosticsReport rep = diagnose(mu, theta, opt.t0);

    json report{{"command", "diagnose"},
                {"inputs",
                 {{"theta", theta.spec()}, {"t0", opt.t0}, {"mu", measure_to_json(mu)}}},
                {"degenerate", rep.degenerate},
                {"h", rep.h},
                {"best_b", ext_real_to_json(rep.best_b)},
                {"a_from_b", rep.a_from_b},
                {"kappa1", rep.kappa1},
                {"kappa2", rep.kappa2},
                {"D", rep.D},
                {"l0", rep.l0},
                {"K_plus", ext_real_to_json(rep.k_plus)},
                {"K_minus", ext_real_to_json(rep.k_minus)},
                {"verdicts",
                 {{"condition_ii_finite", rep.condition_ii_finite},
                  {"kpm_finite", rep.kpm_finite}}},
                {"wall_time_ms", watch.ms()}};
    std::ostringstream os;
    if (rep.degenerate) {
        os << "degenerate: all constants trivial (Dirac measure)\n";
    } else {
        os << "h = " << rep.h << ", best_b = " << rep.best_b << ", a = kappa2*b = "
           << rep.a_from_b << "\n"
           << "kappa1 = " << rep.kappa1 << ", kappa2 = " << rep.kappa2 << "\n"
           << "D = " << rep.D << ", l0 = " << rep.l0 << "\n"
           << "K+ = " << rep.k_plus << ", K- = " << rep.k_minus << "\n";
    }
    emit(report, opt.as_json, os.str());
    return kExitOk;
}

int run_probe(const Options& opt) {
    Stopwatch watch;
    const DiscreteMeasure mu = load_measure(opt.mu_arg);
    const CostFunction theta = parse_theta(opt.theta_spec);
    const ProbeResult res = entropy_inequality_probe(mu, theta, opt.t0, opt.trials, opt.seed);
    const bool holds = res.min_slack >= -1e-9;

    json report{{"command", "probe"},
                {"inputs",
                 {{"theta", theta.spec()},
                  {"t0", opt.t0},
                  {"mu", measure_to_json(mu)},
                  {"trials", opt.trials},
                  {"seed", opt.seed}}},
                {"min_slack", res.min_slack},
                {"best_b", res.best_b},
                {"a", res.a},
                {"verdicts", {{"entropy_inequality", holds}}},
                {"wall_time_ms", watch.ms()}};
    std::ostringstream os;
    os << "min slack H(nu|mu) - Tbar over " << opt.trials << " trials, both directions: "
       << res.min_slack << " (a = " << res.a << ")\n"
       << "entropy inequality: " << verdict_str(holds) << "\n";
    emit(report, opt.as_json, os.str());
    if (!holds) throw VerificationFailure("entropy inequality slack below -1e-9");
    return kExitOk;
}

// ------------------------------------------------------------- verify suite

void require(bool ok, const std::string& what, int& checks) {
    if (!ok) throw VerificationFailure(what);
    ++checks;
}

int run_verify(const Options& opt) {
    Stopwatch watch;
    Rng rng(opt.seed);
    int checks = 0;

    const CostFunction quad = CostFunction::power(2.0);
    const CostFunction p15 = CostFunction::power(1.5);

    // Projection certificates + Frank-Wolfe cross-check.
    for (int inst = 0; inst < opt.instances; ++inst) {
        const auto n = static_cast<Eigen::Index>(rng.uniform_int(1, 6));
        VectorXd a(n), b(n);
        for (Eigen::Index i = 0; i < n; ++i) a(i) = rng.uniform(-5.0, 5.0);
        for (Eigen::Index i = 0; i < n; ++i) b(i) = rng.uniform(-5.0, 5.0);
        std::sort(a.data(), a.data() + n);
        std::sort(b.data(), b.data() + n);

        const ProjectionResult pr = project(a, b);
        require(majorize(pr.c_hat, b).majorized, "projection left Perm(b)", checks);
        require(check_variational(a, pr, b), "variational inequality failed", checks);
        for (int rep = 0; rep < 20; ++rep) {
            VectorXd c = VectorXd::Zero(n);
            double total = 0.0;
            for (int v = 0; v < 3; ++v) {
                VectorXd perm = b;
                for (Eigen::Index k = n - 1; k > 0; --k)
                    std::swap(perm(k), perm(rng.uniform_int(0, k)));
                const double w = rng.exponential();
                c += w * perm;
                total += w;
            }
            c /= total;
            require(residual_majorization(a, pr, b, c), "residual majorization failed", checks);
        }

        OracleConfig cfg;
        cfg.tolerance = 1e-9;
        const FwResult fw = fw_minimize(a, b, quad, cfg);
        double proj_value = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = std::abs(a(i) - pr.c_hat(i));
            proj_value += d * d;
        }
        proj_value /= static_cast<double>(n);
        require(std::abs(fw.value - proj_value) <= 1e-6,
                "Frank-Wolfe value disagrees with projection", checks);
    }

    // Kernel-definition oracle vs projection vs constructed coupling.
    for (int inst = 0; inst < opt.instances / 2; ++inst) {
        const auto m = static_cast<Eigen::Index>(rng.uniform_int(1, 3));
        const auto k = static_cast<Eigen::Index>(rng.uniform_int(1, 3));
        VectorXd xm(m), xk(k);
        for (Eigen::Index i = 0; i < m; ++i) xm(i) = rng.uniform(-3.0, 3.0);
        for (Eigen::Index i = 0; i < k; ++i) xk(i) = rng.uniform(-3.0, 3.0);
        VectorXd wm(m), wk(k);
        for (Eigen::Index i = 0; i < m; ++i) wm(i) = static_cast<double>(rng.uniform_int(1, 4));
        for (Eigen::Index i = 0; i < k; ++i) wk(i) = static_cast<double>(rng.uniform_int(1, 4));
        const DiscreteMeasure mu(xm, wm);
        const DiscreteMeasure nu(xk, wk);

        const WeakCostResult wc = weak_cost(nu, mu, p15);
        const double classical = classical_cost(nu, mu, p15);
        require(wc.value <= classical + 1e-12, "Jensen domination failed", checks);

        OracleConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(rng.uniform_int(0, 1 << 30));
        const double direct = exhaustive_weak_cost(nu, mu, p15, 4, cfg);
        require(std::abs(direct - wc.value) <= 1e-5,
                "kernel-space oracle disagrees with projection", checks);
        const WeakCoupling coupling = optimal_weak_coupling(nu, mu, p15);
        require(std::abs(coupling.cost - wc.value) <= 1e-10,
                "constructed coupling cost disagrees", checks);
        require((coupling.mixed_target() - coupling.target_weights).cwiseAbs().maxCoeff() <=
                    1e-10,
                "coupling marginal violated", checks);
    }

    // Rado / Strassen identities.
    for (int inst = 0; inst < opt.instances; ++inst) {
        const auto n = static_cast<Eigen::Index>(rng.uniform_int(1, 6));
        VectorXd b(n);
        for (Eigen::Index i = 0; i < n; ++i) b(i) = rng.uniform(-5.0, 5.0);
        std::sort(b.data(), b.data() + n);
        VectorXd a = VectorXd::Zero(n);
        double total = 0.0;
        for (int v = 0; v < 2; ++v) {
            VectorXd perm = b;
            for (Eigen::Index k = n - 1; k > 0; --k)
                std::swap(perm(k), perm(rng.uniform_int(0, k)));
            const double w = rng.exponential();
            a += w * perm;
            total += w;
        }
        a /= total;
        std::sort(a.data(), a.data() + n);

        const RadoResult rado = rado_decompose(a, b);
        require(n == 1 || rado.transforms <= static_cast<int>(n) - 1,
                "too many T-transforms", checks);
        require((b.transpose() * rado.P - a.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
                "a = bP identity failed", checks);
        require((rado.P.rowwise().sum() - VectorXd::Ones(n)).cwiseAbs().maxCoeff() <= 1e-10 &&
                    (rado.P.colwise().sum().transpose() - VectorXd::Ones(n))
                            .cwiseAbs()
                            .maxCoeff() <= 1e-10,
                "P is not doubly stochastic", checks);

        const DiscreteMeasure gamma(a);
        const DiscreteMeasure nu(b);
        if (convex_order(gamma, nu).dominated) {
            const MartingaleKernel kernel = strassen_kernel(gamma, nu);
            require((kernel.barycenters() - kernel.source_atoms).cwiseAbs().maxCoeff() <= 1e-10,
                    "martingale barycenter failed", checks);
            require((kernel.mixed_target() - kernel.target_weights).cwiseAbs().maxCoeff() <=
                        1e-10,
                    "kernel mixing failed", checks);
        }
    }

    // Vertex scan: the sorted pairing attains the classical cost and
    // upper-bounds the weak cost.
    for (int inst = 0; inst < opt.instances / 4; ++inst) {
        const auto n = static_cast<Eigen::Index>(rng.uniform_int(1, 5));
        VectorXd a(n), b(n);
        for (Eigen::Index i = 0; i < n; ++i) a(i) = rng.uniform(-5.0, 5.0);
        for (Eigen::Index i = 0; i < n; ++i) b(i) = rng.uniform(-5.0, 5.0);
        std::sort(a.data(), a.data() + n);
        std::sort(b.data(), b.data() + n);
        const DiscreteMeasure mu(a);
        const DiscreteMeasure nu(b);
        const double scan = vertex_scan(a, b, quad);
        require(std::abs(scan - classical_cost(nu, mu, quad)) <= 1e-10,
                "sorted pairing is not the vertex minimum", checks);
        require(weak_cost(nu, mu, quad).value <= scan + 1e-10,
                "weak cost exceeds vertex minimum", checks);
    }

    json report{{"command", "verify"},
                {"inputs", {{"seed", opt.seed}, {"instances", opt.instances}}},
                {"checks_passed", checks},
                {"verdicts", {{"oracle_suite", true}}},
                {"wall_time_ms", watch.ms()}};
    std::ostringstream os;
    os << "oracle suite passed (" << checks << " checks)\n";
    emit(report, opt.as_json, os.str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weakot: weak (barycentric) optimal transport on the line"};
    app.require_subcommand(1);

    Options opt;
    if (const char* env = std::getenv("WEAKOT_SEED")) opt.seed = std::strtoull(env, nullptr, 10);
    app.add_flag("--json", opt.as_json, "emit a JSON report instead of text");

    auto* cost = app.add_subcommand("cost", "classical transport cost by quantile coupling");
    cost->add_option("--theta", opt.theta_spec, "cost spec, e.g. power:p=2")->required();
    cost->add_option("MU", opt.mu_arg, "measure file or inline JSON")->required();
    cost->add_option("NU", opt.nu_arg, "measure file or inline JSON")->required();

    auto* weak = app.add_subcommand("weak-cost", "weak cost Tbar_theta(nu|mu)");
    weak->add_option("--theta", opt.theta_spec)->required();
    weak->add_option("--refine", opt.refine, "uniform refinement size (default: auto)");
    weak->add_flag("--swap", opt.swap, "compute Tbar_theta(mu|nu) instead");
    weak->add_option("MU", opt.mu_arg)->required();
    weak->add_option("NU", opt.nu_arg)->required();

    auto* proj = app.add_subcommand("project", "Euclidean projection onto Perm(b)");
    proj->add_option("A", opt.a_arg, "vector as JSON array or file")->required();
    proj->add_option("B", opt.b_arg)->required();

    auto* order = app.add_subcommand("order", "convex order verdict nu1 <= nu2");
    order->add_option("NU1", opt.a_arg)->required();
    order->add_option("NU2", opt.b_arg)->required();

    auto* maj = app.add_subcommand("majorize", "vector majorization verdict");
    maj->add_option("A", opt.a_arg)->required();
    maj->add_option("B", opt.b_arg)->required();

    auto* rado = app.add_subcommand("rado", "doubly stochastic decomposition a = bP");
    rado->add_option("A", opt.a_arg)->required();
    rado->add_option("B", opt.b_arg)->required();

    auto* couple = app.add_subcommand("couple", "optimal weak coupling kernel");
    couple->add_option("--theta", opt.theta_spec)->required();
    couple->add_option("--refine", opt.refine);
    couple->add_option("MU", opt.mu_arg)->required();
    couple->add_option("NU", opt.nu_arg)->required();

    auto* diag = app.add_subcommand("diagnose", "transport-entropy diagnostics");
    diag->add_option("--theta", opt.theta_spec)->required();
    diag->add_option("--t0", opt.t0, "quadratic range of theta")->required();
    diag->add_option("MU", opt.mu_arg)->required();

    auto* probe = app.add_subcommand("probe", "randomized entropy-inequality probe");
    probe->add_option("--theta", opt.theta_spec)->required();
    probe->add_option("--t0", opt.t0)->required();
    probe->add_option("--trials", opt.trials);
    probe->add_option("--seed", opt.seed);
    probe->add_option("MU", opt.mu_arg)->required();

    auto* verify = app.add_subcommand("verify", "run the oracle suite");
    verify->add_option("--seed", opt.seed);
    verify->add_option("--instances", opt.instances);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "weakot: usage: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*cost) return run_cost(opt);
        if (*weak) return run_weak_cost(opt);
        if (*proj) return run_project(opt);
        if (*order) return run_order(opt);
        if (*maj) return run_majorize(opt);
        if (*rado) return run_rado(opt);
        if (*couple) return run_couple(opt);
        if (*diag) return run_diagnose(opt);
        if (*probe) return run_probe(opt);
        if (*verify) return run_verify(opt);
    } catch (const VerificationFailure& e) {
        std::cerr << "weakot: verification: " << e.what() << "\n";
        return kExitVerification;
    } catch (const std::exception& e) {
        std::cerr << "weakot: invalid input: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}
