#include <doctest.h>

#include <cmath>

#include "nue/map.hpp"
#include "nue/trace.hpp"
#include "support/oracles.hpp"

using namespace nue;

TEST_SUITE("dynamics") {

TEST_CASE("misiurewicz parameter: critical orbit lands on the flipping fixed point") {
    const double a = misiurewicz_a0();
    CHECK(a > 1.0);
    CHECK(a < 2.0);
    const double p = 0.5 * (std::sqrt(1.0 + 4.0 * a) - 1.0);
    CHECK(a - a * a == doctest::Approx(-p).epsilon(1e-12));
    // independent cross-check: the real root of a^3 - 2a^2 + 2a - 2
    CHECK(a * a * a - 2.0 * a * a + 2.0 * a - 2.0 == doctest::Approx(0.0).epsilon(1e-12));
    // f^3(0) is the fixed point itself
    const double f1 = a, f2 = a - f1 * f1, f3 = a - f2 * f2;
    CHECK(f3 == doctest::Approx(p).epsilon(1e-10));
}

TEST_CASE("step: doubling and viana examples") {
    const MapSystem d = make_doubling();
    CHECK(step(d, Point::one_d(0.3)).first == doctest::Approx(0.6).epsilon(1e-15));

    const MapSystem v = make_viana(std::nullopt, 0.01, 16);
    const double a0 = v.a0;
    const Point p1 = step(v, Point::skew(0.0, 0.0));
    CHECK(p1.first == 0.0);
    CHECK(p1.second == a0);  // sin(0) = 0 forces the output
    const Point p2 = step(v, Point::skew(0.5, 1.0));
    CHECK(p2.first == 0.0);  // 16 * 0.5 = 8 = 0 mod 1
    CHECK(p2.second == a0 - 1.0);  // sin2pi(0.5) = -0 exactly
}

TEST_CASE("step rejects points outside the domain") {
    const MapSystem q = make_quadratic(1.9);
    CHECK_THROWS_AS((void)step(q, Point::one_d(100.0)), DomainError);
    const MapSystem v = make_viana();
    CHECK_THROWS_AS((void)step(v, Point::one_d(0.5)), DomainError);  // wrong dimension
}

TEST_CASE("coexpansion examples") {
    const MapSystem q = make_quadratic(1.9);
    CHECK(coexpansion(q, Point::one_d(0.5)) == 0.0);  // log(2 * 0.5) = 0 exactly
    const MapSystem d = make_doubling();
    CHECK(coexpansion(d, Point::one_d(0.123)) == std::log(2.0));
    const MapSystem v = make_viana();
    CHECK(coexpansion(v, Point::skew(0.2, -0.25)) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-15));
    CHECK_THROWS_AS((void)coexpansion(q, Point::one_d(0.0)), SingularityError);
}

TEST_CASE("distances: truncation at delta and the empty-S cap") {
    const MapSystem q = make_quadratic(1.9);
    {
        auto [dist, trunc] = distances(q, Point::one_d(0.05), {0.1});
        CHECK(dist == 0.05);
        CHECK(trunc[0] == 0.05);
    }
    {
        auto [dist, trunc] = distances(q, Point::one_d(0.3), {0.1});
        CHECK(dist == 0.3);
        CHECK(trunc[0] == 1.0);
    }
    const MapSystem d = make_doubling();
    auto [dist, trunc] = distances(d, Point::one_d(0.77), {0.1});
    CHECK(dist == 1.0);
    CHECK(trunc[0] == 1.0);
    CHECK_THROWS_AS((void)distances(d, Point::one_d(0.5), {1.5}), DomainError);
}

TEST_CASE("orbit_trace: doubling constants, empty case, singular start") {
    const MapSystem d = make_doubling();
    const OrbitTrace t = orbit_trace(d, Point::one_d(0.3), 2, {0.25});
    REQUIRE(t.length == 2);
    CHECK(t.a[0] == std::log(2.0));
    CHECK(t.a[1] == std::log(2.0));
    CHECK(t.r[0][0] == 0.0);
    CHECK(t.r[0][1] == 0.0);

    const OrbitTrace empty = orbit_trace(d, Point::one_d(0.3), 0, {0.25});
    CHECK(empty.length == 0);
    CHECK(empty.a.empty());

    const MapSystem q = make_quadratic(2.0);
    try {
        (void)orbit_trace(q, Point::one_d(0.0), 5, {0.1});
        FAIL("expected a singularity error");
    } catch (const SingularityError& e) {
        CHECK(e.index == 0);
    }
}

TEST_CASE("orbit_trace prefix determinism") {
    for (const MapKind kind : {MapKind::doubling, MapKind::quadratic, MapKind::viana}) {
        MapSystem m;
        Point x0;
        if (kind == MapKind::doubling) {
            m = make_doubling();
            x0 = Point::one_d(0.3719);
        } else if (kind == MapKind::quadratic) {
            m = make_quadratic();
            x0 = Point::one_d(0.1);
        } else {
            m = make_viana();
            x0 = Point::skew(0.37, 0.21);
        }
        const OrbitTrace longer = orbit_trace(m, x0, 160, {0.01});
        const OrbitTrace shorter = orbit_trace(m, x0, 100, {0.01});
        for (std::size_t k = 0; k < 100; ++k) {
            REQUIRE(longer.a[k] == shorter.a[k]);
            REQUIRE(longer.r[0][k] == shorter.r[0][k]);
        }
    }
}

TEST_CASE("estimate_lambda: doubling is exactly log 2") {
    const MapSystem d = make_doubling();
    const LambdaEstimate est = estimate_lambda(d, 200, 100, 42);
    CHECK(std::fabs(est.value - std::log(2.0)) < 1e-12);
    CHECK(est.expanding);
    CHECK(est.resampled == 0);
}

TEST_CASE("estimate_lambda: zero synthetic trace is flagged not expanding") {
    SyntheticTrace syn;
    syn.a.assign(50, 0.0);
    syn.delta_levels = {0.01};
    syn.r.assign(1, std::vector<double>(50, 0.0));
    const MapSystem m = make_synthetic(std::move(syn));
    const LambdaEstimate est = estimate_lambda(m, 10, 50, 1);
    CHECK(est.value == 0.0);
    CHECK_FALSE(est.expanding);
}

TEST_CASE("estimate_lambda: viana fiber exponent is strictly positive") {
    const MapSystem v = make_viana();
    const LambdaEstimate est = estimate_lambda(v, 200, 4000, 7, 0.05, 2);
    CHECK(est.value > 0.0);
}

TEST_CASE("estimate_lambda is independent of the thread count") {
    const MapSystem v = make_viana();
    const LambdaEstimate a = estimate_lambda(v, 300, 500, 9, 0.05, 1);
    const LambdaEstimate b = estimate_lambda(v, 300, 500, 9, 0.05, 3);
    CHECK(a.value == b.value);
}

TEST_CASE("nondegeneracy_scan examples") {
    const MapSystem d = make_doubling();
    const NondegeneracyReport rd = nondegeneracy_scan(d, 1.0, 1000);
    CHECK(rd.b_finite);
    CHECK(rd.B_fit == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rd.lipschitz_B_fit == 0.0);

    const MapSystem q = make_quadratic(1.6, Interval{-1.9, 1.9});
    const NondegeneracyReport rq = nondegeneracy_scan(q, 1.0, 4000);
    CHECK(rq.b_finite);
    CHECK(rq.B_fit == doctest::Approx(7.22).epsilon(2e-3));

    const MapSystem c = make_cubic();
    const NondegeneracyReport rc = nondegeneracy_scan(c, 1.0, 1000);
    CHECK_FALSE(rc.b_finite);  // 3x^2 / x -> 0: no finite B at beta = 1
    const NondegeneracyReport rc2 = nondegeneracy_scan(c, 2.0, 1000);
    CHECK(rc2.b_finite);  // beta = 2 matches the cubic criticality
}

TEST_CASE("coexpansion is branch-Lipschitz away from S (condition (3) restated)") {
    // |a(x) - a(y)| <= B_fit * dist(x,y) / dist(x,S) for dist(x,y) < dist(x,S)/2;
    // B_fit >= 2 makes the bound sharp for log|2x|
    const MapSystem q = make_quadratic();
    const NondegeneracyReport rep = nondegeneracy_scan(q, 1.0, 500);
    REQUIRE(rep.B_fit >= 2.0);
    auto g = oracle::rng(77);
    for (int i = 0; i < 2000; ++i) {
        const double x = oracle::uniform(g, q.domain.lo + 1e-6, q.domain.hi - 1e-6);
        const double dist = std::fabs(x);
        if (dist < 1e-8) continue;
        const double h = oracle::uniform(g, 0.0, dist / 2.1);
        const double y = q.domain.contains(x + h) ? x + h : x - h;
        if (std::fabs(y) < 1e-12) continue;
        const double da = std::fabs(coexpansion(q, Point::one_d(x)) -
                                    coexpansion(q, Point::one_d(y)));
        CHECK(da <= rep.B_fit * std::fabs(x - y) / dist + 1e-12);
        // the sampled Lipschitz estimate is of the right scale
        CHECK(rep.lipschitz_B_fit >= 1.0);
        CHECK(rep.lipschitz_B_fit <= rep.B_fit);
    }
}

TEST_CASE("viana forward invariance on a desk-scale sample") {
    const MapSystem v = make_viana();
    const InvarianceReport rep = check_viana_invariance(v, 20000, 300, 5, 2);
    CHECK(rep.invariant);
    CHECK(rep.min_seen >= v.domain.lo);
    CHECK(rep.max_seen <= v.domain.hi);
}

TEST_CASE("viana with base multiplier 2 is supported") {
    const MapSystem v = make_viana(std::nullopt, 0.01, 2);
    const InvarianceReport rep = check_viana_invariance(v, 5000, 200, 5, 2);
    CHECK(rep.invariant);
    CHECK_THROWS_AS((void)make_viana(std::nullopt, 0.01, 7), ConfigError);
}

TEST_CASE("calibrate_delta finds a level for the doubling map") {
    const MapSystem d = make_doubling();
    const auto delta = calibrate_delta(d, 0.01, 20, 200, 3);
    REQUIRE(delta.has_value());
    CHECK(*delta == 0.5);  // empty singular set: every level passes, largest wins
}

}  // TEST_SUITE
