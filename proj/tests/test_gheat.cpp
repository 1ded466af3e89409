#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gexpect/errors.hpp"
#include "gexpect/gheat.hpp"
#include "gexpect/payoff.hpp"
#include "gexpect/rng.hpp"
#include "oracles.hpp"

using namespace gx;

namespace {
// quadrature values frozen for the default payoffs (sigma, t = 1)
constexpr double kSq25Sigma2 = 3.9102399338112264;   // E[min((2Z)^2, 25)]
constexpr double kSq25Sigma1 = 0.9999988920600946;   // E[min(Z^2, 25)]
constexpr double kSq25Sigma15 = 2.246388059968213;   // E[min((1.5 Z)^2, 25)]

GheatOptions fast_opts(int nx = 801) {
    GheatOptions o;
    o.nx = nx;
    o.support_hint = 5.0;
    return o;
}
}  // namespace

TEST_CASE("constants are preserved") {
    const Interval1D theta{1.0, 2.0};
    const Grid1D grid = make_grid(-10, 10, 201, 1.0, theta.sigma_max);
    const GridSolution sol = solve_gheat([](double) { return 2.5; }, theta, grid);
    for (double v : sol.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("odd clamp payoffs: zero only once the cap leaves the diffusion range") {
    const Interval1D theta{1.0, 2.0};
    // cap at 2.5 sigma_max: each constant sigma gives 0, but the controlled sup
    // is strictly positive; the lattice oracle agrees
    auto clamp5 = [](double x) { return std::clamp(x, -5.0, 5.0); };
    const double v = g_normal_expectation(clamp5, theta, 1.0, 0.0, fast_opts());
    CHECK(std::abs(oracle::gaussian(clamp5, 2.0, 1.0)) < 1e-12);
    CHECK(v == doctest::Approx(oracle::lattice_control(clamp5, 1.0, 2.0, 1.0, 21.0))
                   .epsilon(5e-2));
    CHECK(v > 0.0);

    // cap at 8 sigma_max: the kink is unreachable and the value collapses to 0
    auto clamp16 = [](double x) { return std::clamp(x, -16.0, 16.0); };
    GheatOptions o = fast_opts();
    o.support_hint = 16.0;
    CHECK(std::abs(g_normal_expectation(clamp16, theta, 1.0, 0.0, o)) < 1e-6);
}

TEST_CASE("capped quadratic against independent oracles") {
    const Interval1D theta{1.0, 2.0};
    auto sq25 = [](double x) { return std::min(x * x, 25.0); };
    const double v = g_normal_expectation(sq25, theta, 1.0, 0.0, fast_opts());

    // the cap kinks inside the diffusion range, so the value exceeds every
    // constant-sigma solution; the lattice control oracle is the reference
    const double lattice = oracle::lattice_control(sq25, 1.0, 2.0, 1.0, 21.0);
    CHECK(v == doctest::Approx(lattice).epsilon(5e-3));
    CHECK(v >= kSq25Sigma2 - 1e-3);
    CHECK(v >= kSq25Sigma1 - 1e-3);

    // concave side: the cap is 5 sigma_min out, so sigma_min is optimal there
    auto neg = [&sq25](double x) { return -sq25(x); };
    const double vn = g_normal_expectation(neg, theta, 1.0, 0.0, fast_opts());
    CHECK(vn == doctest::Approx(-kSq25Sigma1).epsilon(5e-3));
}

TEST_CASE("singleton theta reduces to classical quadrature") {
    auto sq25 = [](double x) { return std::min(x * x, 25.0); };
    for (double s : {1.0, 1.5, 2.0}) {
        const double v = g_normal_expectation(sq25, Interval1D{s, s}, 1.0, 0.0, fast_opts());
        const double want = s == 1.0 ? kSq25Sigma1 : (s == 2.0 ? kSq25Sigma2 : kSq25Sigma15);
        CHECK(v == doctest::Approx(want).epsilon(5e-3));
        // the kink at |x| = 5 limits Simpson to ~1e-8 here
        CHECK(want == doctest::Approx(oracle::gaussian(sq25, s, 1.0)).epsilon(1e-7));
    }
}

TEST_CASE("lower envelope: u dominates every constant-sigma solution") {
    const Interval1D theta{1.0, 2.0};
    auto sq25 = [](double x) { return std::min(x * x, 25.0); };
    for (double x0 : {-2.0, 0.0, 1.5}) {
        const double u = g_normal_expectation(sq25, theta, 1.0, x0, fast_opts());
        for (double s : {1.0, 1.5, 2.0})
            CHECK(u >= oracle::gaussian(sq25, s, 1.0, x0) - 5e-3);
    }
}

TEST_CASE("t = 0 returns the payoff") {
    const Interval1D theta{1.0, 2.0};
    auto clamp2 = [](double x) { return std::clamp(x, -2.0, 2.0); };
    CHECK(g_normal_expectation(clamp2, theta, 0.0, 1.25) == clamp2(1.25));
}

TEST_CASE("mean and variance certainty") {
    const MeanCertaintyReport r = mean_certainty_checks(Interval1D{1.0, 2.0}, 1.0, fast_opts());
    CHECK(std::abs(r.mean_plus) < 2e-2);
    CHECK(std::abs(r.mean_minus) < 2e-2);
    CHECK(r.upper_variance == doctest::Approx(4.0).epsilon(2e-2 / 4.0));
    CHECK(r.lower_variance == doctest::Approx(1.0).epsilon(2e-2));

    const MeanCertaintyReport rs =
        mean_certainty_checks(Interval1D{1.5, 1.5}, 0.5, fast_opts());
    CHECK(rs.upper_variance == doctest::Approx(1.125).epsilon(2e-2));
    CHECK(rs.lower_variance == doctest::Approx(1.125).epsilon(2e-2));

    const MeanCertaintyReport r0 = mean_certainty_checks(Interval1D{1.0, 2.0}, 0.0);
    CHECK(r0.mean_plus == 0.0);
    CHECK(r0.upper_variance == 0.0);
}

TEST_CASE("convergence under grid refinement") {
    const Interval1D theta{1.0, 2.0};
    const Grid1D base = make_grid(-21, 21, 101, 1.0, theta.sigma_max);

    auto rows_const =
        convergence_study([](double) { return 1.5; }, theta, base, 3);
    for (std::size_t i = 1; i < rows_const.size(); ++i)
        CHECK(rows_const[i].diff_from_prev == 0.0);

    auto sq25 = [](double x) { return std::min(x * x, 25.0); };
    auto rows = convergence_study(sq25, theta, base, 3);
    for (std::size_t i = 2; i < rows.size(); ++i) {
        CHECK(rows[i].diff_from_prev < rows[i - 1].diff_from_prev);
        CHECK(rows[i - 1].diff_from_prev / rows[i].diff_from_prev >= 1.5);
    }

    auto clamp18 = [](double x) { return std::clamp(x, -18.0, 18.0); };
    auto rows_lin = convergence_study(clamp18, theta, base, 2);
    for (std::size_t i = 1; i < rows_lin.size(); ++i)
        CHECK(rows_lin[i].diff_from_prev < 1e-6);
}

TEST_CASE("scheme properties on random payoffs") {
    const Interval1D theta{1.0, 2.0};
    CounterRng rng(41, 0);
    const Grid1D grid = make_grid(-12, 12, 241, 0.5, theta.sigma_max);
    for (int it = 0; it < 15; ++it) {
        const ParsedPayoff p = random_payoff(rng, 1);
        auto f = [&p](double x) { return p.eval1(x); };
        const GridSolution sol = solve_gheat(f, theta, grid);

        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < grid.nx; ++i) {
            lo = std::min(lo, f(grid.node(i)));
            hi = std::max(hi, f(grid.node(i)));
        }
        for (double v : sol.values) {
            CHECK(v >= lo - 1e-9);  // maximum principle
            CHECK(v <= hi + 1e-9);
        }

        // translatability by constants
        const double c = rng.next_uniform(-3.0, 3.0);
        const GridSolution shifted =
            solve_gheat([&f, c](double x) { return f(x) + c; }, theta, grid);
        for (int i = 0; i < grid.nx; ++i)
            CHECK(shifted.values[i] == doctest::Approx(sol.values[i] + c).epsilon(1e-10));

        // subadditivity with Y = -X: E[phi] + E[-phi] >= 0
        const GridSolution negated =
            solve_gheat([&f](double x) { return -f(x); }, theta, grid);
        for (int i = 0; i < grid.nx; ++i)
            CHECK(sol.values[i] + negated.values[i] >= -1e-9);

        // comparison against a dominated payoff
        const ParsedPayoff q = random_payoff(rng, 1);
        auto g = [&p, &q](double x) {
            return std::min(p.eval1(x), q.eval1(x));
        };
        const GridSolution dominated = solve_gheat(g, theta, grid);
        for (int i = 0; i < grid.nx; ++i)
            CHECK(dominated.values[i] <= sol.values[i] + 1e-10);
    }
}

TEST_CASE("degenerate sigma_min carries a warning; CFL violations throw") {
    const Grid1D grid = make_grid(-10, 10, 201, 1.0, 2.0);
    const GridSolution sol =
        solve_gheat([](double x) { return std::clamp(x, -1.0, 1.0); }, Interval1D{0.0, 2.0},
                    grid);
    CHECK_FALSE(sol.warning.empty());

    Grid1D bad = grid;
    bad.nt = 1;  // dt = 1 violates the CFL bound at h = 0.1
    CHECK_THROWS_AS(solve_gheat([](double) { return 0.0; }, Interval1D{1.0, 2.0}, bad),
                    ConfigError);
}
