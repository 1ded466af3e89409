#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gexpect/cylinder.hpp"
#include "gexpect/errors.hpp"
#include "gexpect/gheat.hpp"
#include "gexpect/payoff.hpp"
#include "gexpect/rng.hpp"

using namespace gx;

namespace {

CylinderPayoff from_expr(const std::string& expr, std::vector<double> times) {
    const ParsedPayoff p = parse_payoff(expr, times.size());
    const double hint = support_hint(p);
    const PayoffCertificate cert =
        certify(p, Box::cube(times.size(), -hint - 16.0, hint + 16.0));
    CylinderPayoff cp;
    cp.times = std::move(times);
    cp.payoff = [p](std::span<const double> x) { return p(x); };
    cp.lipschitz = cert.lipschitz_structural;
    cp.support_hint = hint;
    return cp;
}

const CylinderResolution kRes{201, 0.9, 8.0};

}  // namespace

TEST_CASE("input validation") {
    CylinderPayoff cp = from_expr("sqcap(x1, 5)", {1.0});
    cp.times = {1.0, 0.5};
    cp.payoff = [](std::span<const double>) { return 0.0; };
    CHECK_THROWS_AS(cp.validate(), InputError);
    cp.times = {0.5, 1.0, 1.5, 2.0};
    CHECK_THROWS_AS(cp.validate(), InputError);
}

TEST_CASE("n = 1 matches the direct solver bitwise") {
    const Interval1D theta{1.0, 2.0};
    const CylinderPayoff cp = from_expr("sqcap(x1, 5)", {1.0});
    const double via_cylinder = evaluate_cylinder(cp, theta, kRes);
    GheatOptions opt;
    opt.nx = kRes.nx;
    opt.cfl = kRes.cfl;
    opt.width_mult = kRes.width_mult;
    opt.support_hint = cp.support_hint;
    const double direct = g_normal_expectation(
        [&cp](double x) { return cp.payoff(std::span<const double>(&x, 1)); }, theta, 1.0,
        0.0, opt);
    CHECK(via_cylinder == direct);
}

TEST_CASE("payoff in the last increment only: stationarity") {
    const Interval1D theta{1.0, 2.0};
    const CylinderPayoff cp = from_expr("sqcap(x2, 5)", {0.4, 0.9});
    const double v2 = evaluate_cylinder(cp, theta, kRes);
    const CylinderPayoff single = from_expr("sqcap(x1, 5)", {0.5});
    const double v1 = evaluate_cylinder(single, theta, kRes);
    CHECK(v2 == doctest::Approx(v1).epsilon(1e-12));

    // shifting both times leaves the value unchanged
    const CylinderPayoff shifted = from_expr("sqcap(x2, 5)", {1.1, 1.6});
    CHECK(evaluate_cylinder(shifted, theta, kRes) == doctest::Approx(v2).epsilon(1e-12));
}

TEST_CASE("odd aggregate payoff vanishes") {
    const Interval1D theta{1.0, 2.0};
    const CylinderPayoff cp = from_expr("clamp(x1 + x2, -16, 16)", {0.5, 1.0});
    CHECK(std::abs(evaluate_cylinder(cp, theta, kRes)) < 1e-9);
}

TEST_CASE("aggregate capped quadratic matches the single-increment solve") {
    const Interval1D theta{1.0, 2.0};
    const CylinderPayoff two = from_expr("sqcap(x1 + x2, 5)", {0.5, 1.0});
    const CylinderPayoff one = from_expr("sqcap(x1, 5)", {1.0});
    const double v2 = evaluate_cylinder(two, theta, kRes);
    const double v1 = evaluate_cylinder(one, theta, kRes);
    CHECK(std::abs(v2 - v1) < 3e-2);
}

TEST_CASE("dpp consistency") {
    const Interval1D theta{1.0, 2.0};
    const CylinderPayoff one = from_expr("sqcap(x1, 5)", {1.0});
    const DppCheck d = dpp_consistency_check(one, theta, 0.5, kRes);
    CHECK(std::abs(d.direct - d.split) < 3e-2);
    CHECK(d.pass);

    CylinderPayoff c = one;
    c.payoff = [](std::span<const double>) { return 1.75; };
    c.lipschitz = 0.0;
    const DppCheck dc = dpp_consistency_check(c, theta, 0.3, kRes);
    CHECK(dc.direct == doctest::Approx(1.75).epsilon(1e-13));
    CHECK(dc.split == doctest::Approx(1.75).epsilon(1e-13));

    CounterRng rng(47, 0);
    for (int it = 0; it < 5; ++it) {
        const ParsedPayoff p = random_payoff(rng, 1);
        CylinderPayoff cp;
        cp.times = {1.0};
        cp.payoff = [p](std::span<const double> x) { return p(x); };
        cp.support_hint = support_hint(p);
        cp.lipschitz =
            certify(p, Box::cube(1, -cp.support_hint - 16.0, cp.support_hint + 16.0))
                .lipschitz_structural;
        const DppCheck dr = dpp_consistency_check(cp, theta, 0.6, kRes);
        CHECK(dr.pass);
    }
}

TEST_CASE("sublinearity through the recursion") {
    const Interval1D theta{1.0, 2.0};
    const CylinderPayoff phi = from_expr("sqcap(x1 + x2, 4)", {0.5, 1.0});
    const CylinderPayoff chi = from_expr("clamp(x1, -3, 3)", {0.5, 1.0});

    CylinderPayoff sum = phi;
    const auto f = phi.payoff;
    const auto g = chi.payoff;
    sum.payoff = [f, g](std::span<const double> x) { return f(x) + g(x); };
    sum.lipschitz = phi.lipschitz + chi.lipschitz;
    sum.support_hint = std::max(phi.support_hint, chi.support_hint);

    const double vp = evaluate_cylinder(phi, theta, kRes);
    const double vc = evaluate_cylinder(chi, theta, kRes);
    CHECK(evaluate_cylinder(sum, theta, kRes) <= vp + vc + 1e-9);

    CylinderPayoff scaled = phi;
    scaled.payoff = [f](std::span<const double> x) { return 2.5 * f(x); };
    CHECK(evaluate_cylinder(scaled, theta, kRes) == doctest::Approx(2.5 * vp).epsilon(1e-11));

    CylinderPayoff plus_c = phi;
    plus_c.payoff = [f](std::span<const double> x) { return f(x) + 0.75; };
    CHECK(evaluate_cylinder(plus_c, theta, kRes) == doctest::Approx(vp + 0.75).epsilon(1e-11));
}

TEST_CASE("monotone in the uncertainty interval") {
    const CylinderPayoff cp = from_expr("sqcap(x1 + x2, 5)", {0.5, 1.0});
    const double narrow = evaluate_cylinder(cp, Interval1D{1.2, 1.8}, kRes);
    const double wide = evaluate_cylinder(cp, Interval1D{1.0, 2.0}, kRes);
    CHECK(narrow <= wide + 1e-9);
}

TEST_CASE("three increments run within the tensor limit") {
    const Interval1D theta{1.0, 2.0};
    CylinderResolution coarse{81, 0.9, 6.0};
    const CylinderPayoff cp = from_expr("clamp(x1 + x2 + x3, -16, 16)", {0.3, 0.6, 1.0});
    CHECK(std::abs(evaluate_cylinder(cp, theta, coarse)) < 1e-9);
}
