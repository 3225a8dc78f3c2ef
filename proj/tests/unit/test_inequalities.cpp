#include "weakot/inequalities.hpp"

#include "weakot/rng.hpp"
#include "weakot/weak_transport.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace weakot;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
    VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

DiscreteMeasure bernoulli(double p) {
    return DiscreteMeasure(vec({0.0, 1.0}), vec({1.0 - p, p}));
}

const CostFunction kQuad = CostFunction::power(2.0);

/// Random convex PL function bounded below.
ConvexPiecewiseLinear random_potential(Rng& rng) {
    const auto k = static_cast<Eigen::Index>(rng.uniform_int(1, 4));
    VectorXd xs(k);
    for (Eigen::Index i = 0; i < k; ++i) xs(i) = rng.uniform(-4.0, 4.0);
    std::sort(xs.data(), xs.data() + k);
    for (Eigen::Index i = 0; i + 1 < k; ++i)
        if (xs(i + 1) - xs(i) < 1e-6) xs(i + 1) = xs(i) + 1e-6;

    const double left = -rng.exponential();
    const double right = rng.exponential();
    VectorXd slopes(k - 1);
    for (Eigen::Index i = 0; i + 1 < k; ++i) slopes(i) = rng.uniform(left, right);
    std::sort(slopes.data(), slopes.data() + slopes.size());

    VectorXd vs(k);
    vs(0) = rng.uniform(-1.0, 1.0);
    for (Eigen::Index i = 0; i + 1 < k; ++i)
        vs(i + 1) = vs(i) + slopes(i) * (xs(i + 1) - xs(i));
    return ConvexPiecewiseLinear(xs, vs, left, right);
}

} // namespace

TEST_CASE("convex piecewise linear basics") {
    // |x| with clamped outer slopes.
    const ConvexPiecewiseLinear absval(vec({0.0}), vec({0.0}), -1.0, 1.0);
    CHECK(absval(2.5) == 2.5);
    CHECK(absval(-2.5) == 2.5);
    CHECK(absval.nabla_abs(0.0) == 0.0);
    CHECK(absval.nabla_abs(1.0) == 1.0);
    CHECK(absval.argmin() == 0.0);
    CHECK(absval.bounded_below());

    const ConvexPiecewiseLinear vee(vec({-1.0, 1.0}), vec({1.0, 0.5}), -2.0, 1.0);
    CHECK(vee.slope_left(0.0) == doctest::Approx(-0.25));
    CHECK(vee.slope_right(-1.0) == doctest::Approx(-0.25));
    CHECK(vee.slope_left(-1.0) == -2.0);
    CHECK(vee.nabla_abs(0.5) == doctest::Approx(0.25)); // min one-sided slope
    CHECK(vee.argmin() == 1.0);

    CHECK_THROWS_AS(ConvexPiecewiseLinear(vec({0.0, 1.0}), vec({0.0, 1.0}), 2.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("condition (ii) best constant") {
    SUBCASE("Bernoulli half") {
        CHECK(condition_ii_best_b(bernoulli(0.5), kQuad, 1.0) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("Dirac is vacuous") {
        CHECK(condition_ii_best_b(DiscreteMeasure::dirac(2.0), kQuad, 1.0) ==
              std::numeric_limits<double>::infinity());
    }
    SUBCASE("three uniform atoms: two breakpoints") {
        const DiscreteMeasure tri(vec({0.0, 1.0, 2.0}));
        const double expected =
            std::min(1.0, std::sqrt(2.0 * std::log(1.5) + 1.0) / 2.0);
        const double b = condition_ii_best_b(tri, kQuad, 1.0);
        CHECK(b == doctest::Approx(expected).epsilon(1e-12));
        CHECK(b == doctest::Approx(0.6729).epsilon(1e-4));

        // Debug cross-check: a dense grid scan can only sit above the
        // exact infimum over the breakpoints.
        double grid_inf = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= 20000; ++k) {
            const double u = 5.0 * static_cast<double>(k) / 20000.0;
            grid_inf = std::min(grid_inf, kQuad.inverse(u + 1.0) / modulus(tri, u));
        }
        CHECK(b <= grid_inf + 1e-12);
        CHECK(grid_inf == doctest::Approx(b).epsilon(1e-3));
    }
    SUBCASE("rejects costs that are not quadratic near zero") {
        CHECK_THROWS_AS(condition_ii_best_b(bernoulli(0.5), CostFunction::power(1.5), 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(condition_ii_best_b(bernoulli(0.5), kQuad, 0.0), std::invalid_argument);
    }
    SUBCASE("scale covariance") {
        Rng rng(101);
        for (int inst = 0; inst < 20; ++inst) {
            const auto n = static_cast<Eigen::Index>(rng.uniform_int(2, 6));
            VectorXd a(n), w(n);
            for (Eigen::Index i = 0; i < n; ++i) a(i) = rng.uniform(-4.0, 4.0);
            for (Eigen::Index i = 0; i < n; ++i) w(i) = rng.exponential();
            const DiscreteMeasure mu(a, w);
            const double lambda = std::exp(rng.uniform(-1.0, 1.0));
            const double base = condition_ii_best_b(mu, kQuad, 1.0);
            const double scaled =
                condition_ii_best_b(affine_pushforward(mu, lambda, 0.0), kQuad, 1.0);
            CHECK(scaled == doctest::Approx(base / lambda).epsilon(1e-12));
        }
    }
}

TEST_CASE("Poincare constants") {
    const PoincareConstants pb = poincare_constants(bernoulli(0.5));
    CHECK_FALSE(pb.degenerate);
    CHECK(pb.h == 1.0);
    CHECK(pb.D == 5480.0);
    CHECK(pb.l0 == doctest::Approx(1.0 / (10.0 * std::sqrt(2.0))).epsilon(1e-15));

    const PoincareConstants pt = poincare_constants(DiscreteMeasure(vec({0.0, 1.0, 2.0})));
    CHECK(pt.h == 2.0); // the 2log(3/2) ~ 0.81 breakpoint lies below u = 1
    CHECK(pt.D == 21920.0);

    CHECK(poincare_constants(DiscreteMeasure::dirac(0.0)).degenerate);

    // Consistency with the modulus at u = 1.
    Rng rng(103);
    for (int inst = 0; inst < 10; ++inst) {
        VectorXd a(4), w(4);
        for (Eigen::Index i = 0; i < 4; ++i) a(i) = rng.uniform(-3.0, 3.0);
        for (Eigen::Index i = 0; i < 4; ++i) w(i) = rng.exponential();
        const DiscreteMeasure mu(a, w);
        CHECK(poincare_constants(mu).h == modulus(mu, 1.0));
    }
}

TEST_CASE("K plus/minus tail functionals") {
    const CostFunction beta = CostFunction::quad_excess(2.0, 2.0);

    SUBCASE("Dirac: empty tails under the 0/0 convention") {
        const KPlusMinus k = k_plus_minus(DiscreteMeasure::dirac(0.0), beta, 1.0);
        CHECK(k.k_plus == 0.0);
        CHECK(k.k_minus == 0.0);
    }
    SUBCASE("Bernoulli half: vanishing exponent gives the plain tail ratio") {
        const KPlusMinus k = k_plus_minus(bernoulli(0.5), beta, 1.0);
        CHECK(k.k_plus == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(k.k_minus == 0.0); // median sits at the left atom
    }
    SUBCASE("monotone in b") {
        const DiscreteMeasure mu(vec({0.0, 1.0, 3.0, 7.0}), vec({4.0, 3.0, 2.0, 1.0}));
        double prev = 0.0;
        for (double b : {0.25, 0.5, 1.0, 2.0, 4.0}) {
            const KPlusMinus k = k_plus_minus(mu, beta, b);
            CHECK(k.k_plus >= prev);
            prev = k.k_plus;
        }
    }
    SUBCASE("mirror swap on unique-median instances") {
        Rng rng(107);
        for (int inst = 0; inst < 20; ++inst) {
            const auto n = static_cast<Eigen::Index>(rng.uniform_int(2, 6));
            VectorXd a(n), w(n);
            for (Eigen::Index i = 0; i < n; ++i) a(i) = rng.uniform(-4.0, 4.0);
            for (Eigen::Index i = 0; i < n; ++i) w(i) = rng.exponential();
            const DiscreteMeasure mu(a, w);
            bool unique_median = true;
            for (Eigen::Index i = 0; i < n; ++i)
                if (mu.cumulative()(i) == 0.5) unique_median = false;
            if (!unique_median) continue;

            const DiscreteMeasure mirrored((-mu.atoms()).eval(), mu.weights());
            const KPlusMinus k = k_plus_minus(mu, beta, 0.8);
            const KPlusMinus km = k_plus_minus(mirrored, beta, 0.8);
            // Exact up to the constructor's renormalization round-off (the
            // mirrored weight sum accumulates in the opposite order).
            CHECK(km.k_plus == doctest::Approx(k.k_minus).epsilon(1e-13));
            CHECK(km.k_minus == doctest::Approx(k.k_plus).epsilon(1e-13));
        }
    }
}

TEST_CASE("tail functionals stay bounded under the modulus condition") {
    // With the best modulus constant b, the excess cost beta = [theta-t^2]_+
    // satisfies max(K+, K-) <= 3 at b' = b*t0/(2*9*theta^{-1}(2+t0^2)); the
    // chain of constants keeps the exponential tails under control. Large b
    // blows the bound up, so the check discriminates.
    const double t0 = 1.0;
    const CostFunction theta =
        CostFunction::sum(CostFunction::power(2.0), CostFunction::quad_excess(t0, 4.0));
    const CostFunction beta = CostFunction::quad_excess_of(theta, t0);

    const DiscreteMeasure measures[] = {
        bernoulli(0.5), bernoulli(0.2), DiscreteMeasure(vec({0.0, 1.0, 2.0})),
        DiscreteMeasure(vec({-2.0, 0.0, 0.5, 3.0}), vec({1.0, 2.0, 3.0, 1.0}))};
    for (const DiscreteMeasure& mu : measures) {
        const double b = condition_ii_best_b(mu, theta, t0);
        REQUIRE(std::isfinite(b));
        const double a2 = b * t0 / (9.0 * theta.inverse(2.0 + t0 * t0));
        const KPlusMinus k = k_plus_minus(mu, beta, a2 / 2.0);
        CHECK(std::max(k.k_plus, k.k_minus) <= 3.0 + 1e-12);
    }

    // Non-vacuous: a large argument scale exceeds the bound.
    const KPlusMinus blown = k_plus_minus(bernoulli(0.5), beta, 10.0);
    CHECK(blown.k_plus > 3.0);
}

TEST_CASE("probe with a quartic-tail cost") {
    const CostFunction theta =
        CostFunction::sum(CostFunction::power(2.0), CostFunction::quad_excess(1.0, 4.0));
    const ProbeResult res =
        entropy_inequality_probe(DiscreteMeasure(vec({0.0, 1.0, 2.0})), theta, 1.0, 30, 77);
    CHECK(res.min_slack >= -1e-9);
}

TEST_CASE("inf-convolution") {
    const VectorXd grid = vec({-2.0, -0.4, 0.0, 0.3, 0.5, 1.0, 2.0});

    SUBCASE("zero potential stays zero") {
        const ConvexPiecewiseLinear zero(vec({0.0}), vec({0.0}), 0.0, 0.0);
        const VectorXd q = inf_convolution(zero, kQuad, 1.0, grid);
        CHECK(q.cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("absolute value against the quadratic cost") {
        const ConvexPiecewiseLinear absval(vec({0.0}), vec({0.0}), -1.0, 1.0);
        const VectorXd q = inf_convolution(absval, kQuad, 1.0, grid);
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
            const double x = std::abs(grid(i));
            const double expected = x <= 0.5 ? x * x : x - 0.25;
            CHECK(q(i) == doctest::Approx(expected).epsilon(1e-9));
        }
    }
    SUBCASE("clamped affine shifts by the completed square") {
        const double L = 1.4;
        // Slope L to the right of -50, flat to the left: bounded below and
        // affine on the whole working window.
        const ConvexPiecewiseLinear ramp(vec({-50.0}), vec({0.0}), 0.0, L);
        const VectorXd q = inf_convolution(ramp, kQuad, 1.0, grid);
        for (Eigen::Index i = 0; i < grid.size(); ++i)
            CHECK(q(i) == doctest::Approx(ramp(grid(i)) - L * L / 4.0).epsilon(1e-9));
    }
    SUBCASE("unbounded potentials rejected") {
        const ConvexPiecewiseLinear down(vec({0.0}), vec({0.0}), 0.5, 1.0);
        CHECK_THROWS_AS(inf_convolution(down, kQuad, 1.0, grid), std::invalid_argument);
    }
}

TEST_CASE("weak duality") {
    SUBCASE("orientation regression instance") {
        // A tent potential that overshoots Tbar(nu|mu)=0 but stays below
        // Tbar(mu|nu)=1; a flipped orientation would report a positive gap.
        const DiscreteMeasure mu = DiscreteMeasure::dirac(0.0);
        const DiscreteMeasure nu(vec({-1.0, 1.0}));
        const ConvexPiecewiseLinear tent(vec({-1.0, 0.0, 1.0}), vec({1.0, 0.0, 1.0}), -2.0,
                                         2.0);
        CHECK(weak_cost(nu, mu, kQuad).value == doctest::Approx(0.0));
        CHECK(weak_cost(mu, nu, kQuad).value == doctest::Approx(1.0));

        const double candidate = 0.75; // int Q1 tent dnu - int tent dmu
        const double gap = dual_gap(nu, mu, kQuad, {tent});
        CHECK(gap == doctest::Approx(candidate - 1.0).epsilon(1e-9));
        CHECK(gap <= 1e-8);
    }
    SUBCASE("zero potential bounds from below by -Tbar") {
        const DiscreteMeasure mu = DiscreteMeasure::dirac(0.0);
        const DiscreteMeasure nu(vec({-1.0, 1.0}));
        const ConvexPiecewiseLinear zero(vec({0.0}), vec({0.0}), 0.0, 0.0);
        CHECK(dual_gap(nu, mu, kQuad, {zero}) ==
              doctest::Approx(-weak_cost(mu, nu, kQuad).value).epsilon(1e-12));
    }
    SUBCASE("random potential sweeps stay non-positive") {
        Rng rng(109);
        for (int inst = 0; inst < 12; ++inst) {
            const auto n = static_cast<Eigen::Index>(rng.uniform_int(1, 6));
            const auto m = static_cast<Eigen::Index>(rng.uniform_int(1, 6));
            VectorXd xa(n), wa(n), xb(m), wb(m);
            for (Eigen::Index i = 0; i < n; ++i) xa(i) = rng.uniform(-3.0, 3.0);
            for (Eigen::Index i = 0; i < n; ++i) wa(i) = rng.exponential();
            for (Eigen::Index i = 0; i < m; ++i) xb(i) = rng.uniform(-3.0, 3.0);
            for (Eigen::Index i = 0; i < m; ++i) wb(i) = rng.exponential();
            const DiscreteMeasure nu(xa, wa);
            const DiscreteMeasure mu(xb, wb);
            std::vector<ConvexPiecewiseLinear> potentials;
            for (int k = 0; k < 25; ++k) potentials.push_back(random_potential(rng));
            CHECK(dual_gap(nu, mu, kQuad, potentials) <= 1e-8);
        }
    }
}

TEST_CASE("discrete log-Sobolev inequality") {
    SUBCASE("constant function saturates trivially") {
        const LogSobolevResult r =
            log_sobolev_check([](double) { return 0.0; }, StepDirection::backward);
        CHECK(r.lhs <= 1e-10);
        CHECK(r.rhs == 0.0);
        CHECK(r.holds);
    }
    SUBCASE("admissible clamped ramp") {
        const auto f = [](double x) { return 0.07 * std::clamp(x, -5.0, 5.0); };
        const LogSobolevResult rb = log_sobolev_check(f, StepDirection::backward);
        CHECK(rb.holds);
        const LogSobolevResult rf = log_sobolev_check(f, StepDirection::forward);
        CHECK(rf.holds);
        CHECK(rb.lhs > 0.0);
        CHECK(rb.lhs <= rb.rhs + 1e-9);
    }
    SUBCASE("hypothesis gate rejects steep increments") {
        const auto f = [](double x) { return 0.1 * std::clamp(x, -5.0, 5.0); };
        CHECK_THROWS_AS(log_sobolev_check(f, StepDirection::backward), std::invalid_argument);
        const auto g = [](double x) { return -x; };
        CHECK_THROWS_AS(log_sobolev_check(g, StepDirection::backward), std::invalid_argument);
    }
}

TEST_CASE("entropy inequality probe") {
    const ProbeResult res = entropy_inequality_probe(bernoulli(0.5), kQuad, 1.0, 40, 2024);
    CHECK(res.best_b == doctest::Approx(1.0));
    CHECK(res.a == doctest::Approx(kappa2(kQuad, 1.0)).epsilon(1e-12));
    CHECK(res.min_slack >= -1e-9);

    CHECK_THROWS_AS(entropy_inequality_probe(DiscreteMeasure::dirac(0.0), kQuad, 1.0, 5, 1),
                    std::invalid_argument);
}

TEST_CASE("kappa constants follow the cost") {
    CHECK(kappa1(kQuad, 1.0) ==
          doctest::Approx(1.0 / (8.0 * std::sqrt(std::log(3.0) + 1.0))).epsilon(1e-15));
    CHECK(kappa2(kQuad, 1.0) == doctest::Approx(1.0 / (210.0 * std::sqrt(3.0))).epsilon(1e-15));
    // quad_lin inverse hits the linear branch for arguments beyond t0^2.
    const CostFunction t1 = CostFunction::quad_lin(1.0);
    CHECK(kappa1(t1, 1.0) ==
          doctest::Approx(1.0 / (8.0 * (std::log(3.0) + 2.0) / 2.0)).epsilon(1e-12));
}

TEST_CASE("diagnose assembles the report") {
    const DiagnosticsReport rep = diagnose(bernoulli(0.5), kQuad, 1.0);
    CHECK_FALSE(rep.degenerate);
    CHECK(rep.h == 1.0);
    CHECK(rep.best_b == doctest::Approx(1.0));
    CHECK(rep.D == 5480.0);
    CHECK(rep.a_from_b == doctest::Approx(kappa2(kQuad, 1.0)).epsilon(1e-12));
    CHECK(rep.condition_ii_finite);
    CHECK(rep.kpm_finite);

    const DiagnosticsReport deg = diagnose(DiscreteMeasure::dirac(1.0), kQuad, 1.0);
    CHECK(deg.degenerate);
    CHECK_FALSE(deg.condition_ii_finite);
}
