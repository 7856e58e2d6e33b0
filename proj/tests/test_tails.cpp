#include <doctest.h>

#include <cmath>

#include "nue/rng.hpp"
#include "nue/tails.hpp"
#include "support/oracles.hpp"

using namespace nue;

namespace {

HyperbolicParams params3(double lambda) {
    HyperbolicParams p;
    p.lambda = lambda;
    p.sigma = std::exp(-lambda / 8.0);
    p.b = 0.125;
    p.eps = {0.01, 0.01, 0.01};
    p.delta = p.delta_of_eps(0.01);
    return p;
}

}  // namespace

TEST_SUITE("tails") {

TEST_CASE("sample_tail: doubling resolves h2 at n = 1 for every sample") {
    const MapSystem d = make_doubling();
    const TailHistogram hist = sample_tail(d, HWhich::h2, params3(std::log(2.0)), 50, 500, 3);
    CHECK(hist.total == 500);
    CHECK(hist.survivors[0] == 500);
    for (std::size_t n = 1; n < hist.survivors.size(); ++n) CHECK(hist.survivors[n] == 0);
    CHECK(hist.censored == 0);
    CHECK_THROWS_AS(
        (void)sample_tail(d, HWhich::h2, params3(std::log(2.0)), 50, 0, 3), ContractError);
}

TEST_CASE("sample_tail: viana tail is positive, nonincreasing and reproducible") {
    const MapSystem v = make_viana();
    const auto p = params3(0.4);
    const TailHistogram a = sample_tail(v, HWhich::h2, p, 200, 2000, 11, 1);
    const TailHistogram b = sample_tail(v, HWhich::h2, p, 200, 2000, 11, 3);
    REQUIRE(a.survivors == b.survivors);  // bit-for-bit, any thread count
    CHECK(a.censored == b.censored);
    a.validate();
    CHECK(a.survivors[1] > 0);  // not everything resolves instantly
    bool strictly_decreasing_somewhere = false;
    for (std::size_t n = 1; n < a.survivors.size(); ++n) {
        CHECK(a.survivors[n] <= a.survivors[n - 1]);
        if (a.survivors[n] < a.survivors[n - 1]) strictly_decreasing_somewhere = true;
    }
    CHECK(strictly_decreasing_somewhere);
}

TEST_CASE("sample_tail: h1 censoring semantics on a short horizon") {
    const MapSystem v = make_viana();
    HyperbolicParams p = params3(0.4);
    p.eps = {0.01, 0.01};
    const TailHistogram h = sample_tail(v, HWhich::h1, p, 60, 1000, 5);
    h.validate();
    // censored samples survive every n
    CHECK(h.survivors.back() >= h.censored);
    CHECK(h.total == 1000);
}

TEST_CASE("merging over disjoint seeds equals a run over the pooled points") {
    const MapSystem v = make_viana();
    const auto p = params3(0.4);
    const TailHistogram a = sample_tail(v, HWhich::h2, p, 100, 700, 101);
    const TailHistogram b = sample_tail(v, HWhich::h2, p, 100, 900, 202);
    const TailHistogram m = merge(a, b);
    CHECK(m.total == 1600);
    m.validate();
    for (std::size_t n = 0; n < m.survivors.size(); ++n)
        CHECK(m.survivors[n] == a.survivors[n] + b.survivors[n]);

    // pooled explicit points through the same evaluator: count additivity
    std::vector<Point> pts;
    std::uint64_t sm = 4242;
    for (int i = 0; i < 300; ++i)
        pts.push_back(Point::skew(to_unit(splitmix64(sm)),
                                  v.domain.lo + v.domain.length() * to_unit(splitmix64(sm))));
    const TailHistogram whole =
        sample_tail_points(v, HWhich::h2, p, 100, std::span<const Point>(pts), 7);
    const TailHistogram h1 = sample_tail_points(
        v, HWhich::h2, p, 100, std::span<const Point>(pts.data(), 120), 7);
    const TailHistogram h2 = sample_tail_points(
        v, HWhich::h2, p, 100, std::span<const Point>(pts.data() + 120, 180), 7);
    const TailHistogram pooled = merge(h1, h2);
    REQUIRE(pooled.survivors == whole.survivors);
}

TEST_CASE("fit_decay recovers noiseless model parameters within 1%") {
    {  // stretched: u_n = e^{-2 sqrt n}
        std::vector<double> u(401, 0.0);
        for (std::size_t n = 1; n < u.size(); ++n)
            u[n] = std::exp(-2.0 * std::sqrt(static_cast<double>(n)));
        const DecayFit f = fit_decay(u, FitWindow{10, 400}, DecayModel::stretched);
        CHECK(f.c == doctest::Approx(2.0).epsilon(0.01));
        CHECK(f.eta == doctest::Approx(0.5).epsilon(0.01));
    }
    {  // polynomial: u_n = 10 n^-3
        std::vector<double> u(401, 0.0);
        for (std::size_t n = 1; n < u.size(); ++n)
            u[n] = 10.0 * std::pow(static_cast<double>(n), -3.0);
        const DecayFit f = fit_decay(u, FitWindow{5, 400}, DecayModel::polynomial);
        CHECK(f.gamma == doctest::Approx(3.0).epsilon(0.01));
        CHECK(f.C == doctest::Approx(10.0).epsilon(0.01));
    }
    {  // exponential: u_n = 0.7 e^{-0.3 n}
        std::vector<double> u(301, 0.0);
        for (std::size_t n = 1; n < u.size(); ++n)
            u[n] = 0.7 * std::exp(-0.3 * static_cast<double>(n));
        const DecayFit f = fit_decay(u, FitWindow{5, 300}, DecayModel::exponential);
        CHECK(f.c == doctest::Approx(0.3).epsilon(0.01));
    }
    {  // constant: flat polynomial fit
        std::vector<double> u(101, 0.5);
        const DecayFit f = fit_decay(u, FitWindow{5, 100}, DecayModel::polynomial);
        CHECK(std::fabs(f.gamma) < 1e-9);
        CHECK(f.C == doctest::Approx(0.5).epsilon(1e-9));
    }
    {  // underdetermined
        std::vector<double> u(8, 0.0);
        u[1] = 0.5;
        u[2] = 0.25;
        CHECK_THROWS_AS((void)fit_decay(u, FitWindow{1, 7}, DecayModel::polynomial),
                        UnderdeterminedError);
    }
}

TEST_CASE("polynomial_decay_check: worked examples") {
    {
        std::vector<double> u(1001, 1.0);
        for (std::size_t n = 1; n < u.size(); ++n)
            u[n] = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
        const auto res = polynomial_decay_check(u, 1000);
        CHECK(res.ok);
        CHECK(res.C == doctest::Approx(4.0).epsilon(0.01));
    }
    {
        std::vector<double> u(201, 1.0);
        for (std::size_t n = 1; n < u.size(); ++n)
            u[n] = std::exp(-static_cast<double>(n));
        const auto res = polynomial_decay_check(u, 200);
        CHECK_FALSE(res.ok);  // C grows like e^{n/2}
    }
    {
        std::vector<double> u(101, 1.0);
        const auto res = polynomial_decay_check(u, 100);
        CHECK(res.ok);
        CHECK(res.C == 1.0);
    }
    std::vector<double> bad(10, 1.0);
    bad[5] = 0.0;
    CHECK_THROWS_AS((void)polynomial_decay_check(bad, 9), ContractError);
}

TEST_CASE("histogram fit window skips the censoring plateau") {
    TailHistogram h;
    h.total = 1000;
    h.censored = 50;
    h.survivors.assign(101, 0);
    for (std::size_t n = 0; n <= 100; ++n) {
        const double frac = std::exp(-0.5 * std::sqrt(static_cast<double>(n)));
        h.survivors[n] =
            std::max<std::int64_t>(static_cast<std::int64_t>(1000.0 * frac), 50);
    }
    const DecayFit f = fit_decay(h, DecayModel::stretched);
    CHECK(f.window_hi <= 100);
    // the plateau (survivors == censored) must not poison the fit
    CHECK(f.eta == doctest::Approx(0.5).epsilon(0.15));
}

}  // TEST_SUITE
