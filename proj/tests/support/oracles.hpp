#pragma once

// Test-only oracles, kept independent of the library implementations they
// check. Window sums accumulate from the anchor backwards (fresh per (n,k)),
// matching the documented tie-breaking convention.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// Literal evaluation of the hyperbolic-time predicate: for all 1 <= k <= n,
// sum_{j=n-k}^{n-1} a_j >= k*L and r_{n-k} <= b*(k*L), L = -log(sigma).
inline std::vector<long> hyperbolic_times(const std::vector<double>& a,
                                          const std::vector<double>& r, double sigma,
                                          double b) {
    const double L = -std::log(sigma);
    std::vector<long> out;
    const long N = static_cast<long>(a.size());
    for (long n = 1; n <= N; ++n) {
        bool ok = true;
        for (long k = 1; k <= n && ok; ++k) {
            double w = 0.0;
            for (long j = 1; j <= k; ++j) w += a[static_cast<std::size_t>(n - j)];
            if (!(w >= static_cast<double>(k) * L)) ok = false;
            if (ok && !(r[static_cast<std::size_t>(n - k)] <=
                        b * (static_cast<double>(k) * L)))
                ok = false;
        }
        if (ok) out.push_back(n);
    }
    return out;
}

// Literal Pliss predicate scan.
inline std::vector<long> pliss_times(const std::vector<double>& a, double c1) {
    std::vector<long> out;
    const long N = static_cast<long>(a.size());
    for (long p = 1; p <= N; ++p) {
        bool ok = true;
        for (long k = 1; k <= p && ok; ++k) {
            double w = 0.0;
            for (long j = 1; j <= k; ++j) w += a[static_cast<std::size_t>(p - j)];
            if (!(w >= c1 * static_cast<double>(k))) ok = false;
        }
        if (ok) out.push_back(p);
    }
    return out;
}

// Composition-sum coefficient: sum over all tuples (n_1..n_p >= R, sum = n)
// of prod C5 lam2^{n_i}, by direct enumeration.
inline double composition_sum(double C5, double lam2, long R, long n) {
    if (n == 0) return 0.0;
    double total = 0.0;
    // recursive enumeration over the first part
    struct Rec {
        double C5, lam2;
        long R;
        double operator()(long rem) const {
            if (rem == 0) return 1.0;
            if (rem < R) return 0.0;
            double s = 0.0;
            for (long part = R; part <= rem; ++part)
                s += C5 * std::pow(lam2, static_cast<double>(part)) * (*this)(rem - part);
            return s;
        }
    } rec{C5, lam2, R};
    total = rec(n);
    return total;
}

// Exact Cor(f, g o T^n) for the doubling map with f = g = x - 1/2, by
// branchwise integration: on [j 2^-n, (j+1) 2^-n), T^n x = 2^n x - j.
inline double doubling_corr_exact(long n) {
    const double m = std::ldexp(1.0, static_cast<int>(n));  // 2^n
    double total = 0.0;
    for (long j = 0; j < static_cast<long>(m); ++j) {
        // integral of (x - 1/2)(m x - j - 1/2) dx over [j/m, (j+1)/m]
        const double a = static_cast<double>(j) / m;
        const double b = static_cast<double>(j + 1) / m;
        auto F = [&](double x) {
            // antiderivative of (x - 1/2)(m x - j - 1/2)
            const double c1 = m;
            const double c2 = -(static_cast<double>(j) + 0.5) - 0.5 * m;
            const double c3 = 0.5 * (static_cast<double>(j) + 0.5);
            return c1 * x * x * x / 3.0 + c2 * x * x / 2.0 + c3 * x;
        };
        total += F(b) - F(a);
    }
    return total;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo = 0.0, double hi = 1.0) {
    const double u = static_cast<double>(g() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

}  // namespace oracle
