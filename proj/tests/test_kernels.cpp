#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nue/kernels.hpp"
#include "support/oracles.hpp"

using namespace nue;

namespace {

// run fn under a forced backend, restoring the best one afterwards
template <class F>
void with_backend(kern::Backend b, F&& fn) {
    const kern::Backend prev = kern::active_backend();
    kern::force_backend(b);
    fn();
    kern::force_backend(prev);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("sin2pi matches an extended-precision oracle") {
    auto g = oracle::rng(11);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double x = oracle::uniform(g, -3.0, 3.0);
        const long double ref =
            sinl(2.0L * 3.141592653589793238462643383279502884L * static_cast<long double>(x));
        worst = std::max(worst, std::fabs(kern::sin2pi(x) - static_cast<double>(ref)));
    }
    CHECK(worst < 1e-15);
}

TEST_CASE("sin2pi is exact on quarter turns") {
    CHECK(kern::sin2pi(0.0) == 0.0);
    CHECK(kern::sin2pi(0.25) == 1.0);
    CHECK(kern::sin2pi(-0.25) == -1.0);
    CHECK(std::fabs(kern::sin2pi(0.5)) == 0.0);
    CHECK(std::fabs(kern::sin2pi(1.0)) == 0.0);
    CHECK(kern::sin2pi(1.25) == 1.0);
}

TEST_CASE("log_pos matches libm") {
    auto g = oracle::rng(12);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double x = oracle::uniform(g, 1e-12, 4.0);
        if (i % 7 == 0) x = oracle::uniform(g, 1e-300, 1e-290);  // extreme exponents
        const double rel =
            std::fabs(kern::log_pos(x) - std::log(x)) / std::max(1e-30, std::fabs(std::log(x)));
        worst = std::max(worst, rel);
    }
    CHECK(worst < 1e-13);
    CHECK(kern::log_pos(1.0) == 0.0);
    CHECK(kern::log_pos(2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("batch kernels are bit-identical across backends") {
    if (!kern::backend_available(kern::Backend::avx2)) {
        MESSAGE("avx2 unavailable on this host; scalar-only check");
        return;
    }
    auto g = oracle::rng(13);
    for (const std::size_t n : {1u, 3u, 4u, 7u, 64u, 1001u}) {
        std::vector<double> in(n), a(n), b(n);
        for (auto& v : in) v = oracle::uniform(g, -4.0, 4.0);
        with_backend(kern::Backend::scalar, [&] { kern::sin2pi(in.data(), a.data(), n); });
        with_backend(kern::Backend::avx2, [&] { kern::sin2pi(in.data(), b.data(), n); });
        for (std::size_t i = 0; i < n; ++i) REQUIRE(a[i] == b[i]);

        for (auto& v : in) v = oracle::uniform(g, 1e-14, 4.0);
        with_backend(kern::Backend::scalar, [&] { kern::log_pos(in.data(), a.data(), n); });
        with_backend(kern::Backend::avx2, [&] { kern::log_pos(in.data(), b.data(), n); });
        for (std::size_t i = 0; i < n; ++i) REQUIRE(a[i] == b[i]);

        std::vector<double> x1(n), x2(n);
        for (std::size_t i = 0; i < n; ++i) x1[i] = x2[i] = oracle::uniform(g);
        with_backend(kern::Backend::scalar, [&] {
            for (int s = 0; s < 20; ++s) kern::step_linear(x1.data(), n, 2.0);
        });
        with_backend(kern::Backend::avx2, [&] {
            for (int s = 0; s < 20; ++s) kern::step_linear(x2.data(), n, 2.0);
        });
        for (std::size_t i = 0; i < n; ++i) REQUIRE(x1[i] == x2[i]);

        for (std::size_t i = 0; i < n; ++i) x1[i] = x2[i] = oracle::uniform(g, -1.5, 1.5);
        with_backend(kern::Backend::scalar, [&] {
            for (int s = 0; s < 20; ++s) kern::step_quadratic(x1.data(), n, 1.7);
        });
        with_backend(kern::Backend::avx2, [&] {
            for (int s = 0; s < 20; ++s) kern::step_quadratic(x2.data(), n, 1.7);
        });
        for (std::size_t i = 0; i < n; ++i) REQUIRE(x1[i] == x2[i]);
    }
}

TEST_CASE("viana_step lanes agree bit for bit across backends") {
    if (!kern::backend_available(kern::Backend::avx2)) return;
    auto g = oracle::rng(14);
    const std::size_t n = 37;
    std::vector<std::uint64_t> base1(n), rng1(n), base2, rng2;
    std::vector<double> x1(n), w1(n), x2, w2(n);
    for (std::size_t i = 0; i < n; ++i) {
        base1[i] = g() & ((1ull << 52) - 1);
        rng1[i] = g() | 1;
        x1[i] = oracle::uniform(g, -1.0, 1.5);
    }
    base2 = base1;
    rng2 = rng1;
    x2 = x1;
    with_backend(kern::Backend::scalar, [&] {
        for (int s = 0; s < 100; ++s)
            kern::viana_step(base1.data(), rng1.data(), x1.data(), w1.data(), n, 1.7, 0.05, 4);
    });
    with_backend(kern::Backend::avx2, [&] {
        for (int s = 0; s < 100; ++s)
            kern::viana_step(base2.data(), rng2.data(), x2.data(), w2.data(), n, 1.7, 0.05, 4);
    });
    for (std::size_t i = 0; i < n; ++i) {
        REQUIRE(x1[i] == x2[i]);
        REQUIRE(base1[i] == base2[i]);
        REQUIRE(rng1[i] == rng2[i]);
        REQUIRE(w1[i] == w2[i]);
    }
}

TEST_CASE("viana_step keeps the base uniform and in range") {
    std::uint64_t base = 0x8000000000000ull;  // 2^51, omega = 0.5
    std::uint64_t rng = 12345;
    double x = 0.3;
    double mn = 1.0, mx = 0.0, mean = 0.0;
    const int steps = 200000;
    for (int s = 0; s < steps; ++s) {
        double omega;
        kern::viana_step(&base, &rng, &x, &omega, 1, 1.7, 0.01, 4);
        mn = std::min(mn, omega);
        mx = std::max(mx, omega);
        mean += omega;
    }
    mean /= steps;
    CHECK(mn >= 0.0);
    CHECK(mx < 1.0);
    CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
}

}  // TEST_SUITE
