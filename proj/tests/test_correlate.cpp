#include <doctest.h>

#include <cmath>

#include "nue/correlate.hpp"
#include "nue/orbit_engine.hpp"
#include "support/oracles.hpp"

using namespace nue;

TEST_SUITE("correlate") {

TEST_CASE("doubling sawtooth correlations match 2^-n / 12") {
    // the exact branchwise integral agrees with the Fourier value first
    for (long n = 0; n <= 10; ++n)
        CHECK(oracle::doubling_corr_exact(n) ==
              doctest::Approx(std::ldexp(1.0, -static_cast<int>(n)) / 12.0).epsilon(1e-9));

    const MapSystem d = make_doubling();
    const Observable f = Observable::coordinate_minus_half();
    const auto cor = correlate(d, f, f, 10, 1 << 20, 1000, 2024);
    for (long n = 0; n <= 10; ++n) {
        const double want = std::ldexp(1.0, -static_cast<int>(n)) / 12.0;
        const auto& pt = cor[static_cast<std::size_t>(n)];
        CHECK(std::fabs(pt.cor - want) <= 3.0 * pt.stderr_);
    }
    CHECK(cor[0].cor == doctest::Approx(1.0 / 12.0).epsilon(0.01));
}

TEST_CASE("constant observable decorrelates to exactly zero after centering") {
    const MapSystem d = make_doubling();
    Observable half = Observable::user({{0.0, 0.5}, {1.0, 0.5}});
    const Observable g = Observable::coordinate_minus_half();
    const auto cor = correlate(d, half, g, 5, 1 << 14, 100, 5);
    for (const auto& pt : cor) CHECK(pt.cor == 0.0);
}

TEST_CASE("user observables interpolate and report a Lipschitz estimate") {
    const Observable obs = Observable::user({{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.0}});
    CHECK(obs.eval(0.25) == doctest::Approx(0.5));
    CHECK(obs.eval(0.75) == doctest::Approx(0.5));
    CHECK(obs.eval(-1.0) == 0.0);  // clamped
    CHECK(obs.lipschitz_estimate() == doctest::Approx(2.0));
    CHECK_THROWS_AS((void)Observable::user({{0.0, 1.0}}), ContractError);
}

TEST_CASE("indicator observables are 0/1 on the cell") {
    const Observable ind = Observable::indicator(Interval{0.25, 0.5});
    CHECK(ind.eval(0.3) == 1.0);
    CHECK(ind.eval(0.5) == 0.0);  // half-open
    CHECK(ind.eval(0.24) == 0.0);
}

TEST_CASE("invariant_histogram: full-branch linear maps have uniform density") {
    const MapSystem d = make_doubling();
    const std::size_t bins = 50, length = 1000000;
    const auto dens = invariant_histogram(d, Point::one_d(0.37), length, bins);
    const double tol = 5.0 / std::sqrt(static_cast<double>(length) / bins);
    for (double v : dens) CHECK(std::fabs(v - 1.0) <= tol);

    const MapSystem t = make_ternary();
    const auto dens3 = invariant_histogram(t, Point::one_d(0.21), length, bins);
    for (double v : dens3) CHECK(std::fabs(v - 1.0) <= tol);
}

TEST_CASE("invariant_histogram: single bin and the length precondition") {
    const MapSystem d = make_doubling();
    const auto one = invariant_histogram(d, Point::one_d(0.1), 1000, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)invariant_histogram(d, Point::one_d(0.1), 100, 10), ContractError);
}

TEST_CASE("pushforward bound: Leb(H_n cap T^-n A) <= C Leb(A) on the doubling map") {
    // every n is hyperbolic for the doubling map at the default sigma, so
    // this is a grid estimate of Leb(T^-n A) against Leb(A)
    auto g = oracle::rng(31);
    const long grid = 20000;
    double C_worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const double lo = oracle::uniform(g, 0.0, 0.9);
        const double hi = lo + oracle::uniform(g, 0.02, 1.0 - lo);
        const long n = 1 + static_cast<long>(g() % 12);
        long count = 0;
        for (long i = 0; i < grid; ++i) {
            double x = (static_cast<double>(i) + 0.5) / grid;
            for (long k = 0; k < n; ++k) {
                x *= 2.0;
                x -= std::floor(x);
            }
            if (x >= lo && x < hi) ++count;
        }
        const double measure = static_cast<double>(count) / grid;
        C_worst = std::max(C_worst, measure / (hi - lo));
    }
    CHECK(C_worst <= 1.1);  // a single constant across all trials
}

TEST_CASE("viana correlations: lag zero is the fiber variance") {
    const MapSystem v = make_viana();
    const Observable f = Observable::coordinate_minus_half();
    const auto cor = correlate(v, f, f, 3, 200000, 2000, 8);
    CHECK(cor[0].cor > 0.0);
    CHECK(cor[0].cor > 10.0 * cor[0].stderr_);
}

}  // TEST_SUITE
