#pragma once

// Scalar reference algorithms for the math kernels. The AVX2 translation
// in kernels_avx2.cpp performs the same IEEE operations lane-wise, so both
// backends produce bit-identical results; the equivalence tests assert it.
// Rounding mode is assumed to be the default round-to-nearest-even.

#include <bit>
#include <cmath>
#include <cstdint>

namespace nue::kern::detail {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kSqrtHalf = 0.70710678118654752440;
// Cephes-style hi/lo split of ln 2.
inline constexpr double kLn2Hi = 6.93147180369123816490e-1;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kDblMinNormal = 2.2250738585072014e-308;

// sin(t) for |t| <= pi/4 + ulp slack. Minimax coefficients as used by the
// classic Cephes sin; relative error ~1e-17 on the range.
inline double sin_small(double t) noexcept {
    const double z = t * t;
    double p = 1.58962301576546568060e-10;
    p = std::fma(p, z, -2.50507477628578072866e-8);
    p = std::fma(p, z, 2.75573136213857245213e-6);
    p = std::fma(p, z, -1.98412698295895385996e-4);
    p = std::fma(p, z, 8.33333333332211858878e-3);
    p = std::fma(p, z, -1.66666666666666307295e-1);
    return std::fma(t * z, p, t);
}

// cos(t) for |t| <= pi/4 + ulp slack.
inline double cos_small(double t) noexcept {
    const double z = t * t;
    double p = -1.13585365213876817300e-11;
    p = std::fma(p, z, 2.08757008419747316778e-9);
    p = std::fma(p, z, -2.75573141792967388112e-7);
    p = std::fma(p, z, 2.48015872888517179954e-5);
    p = std::fma(p, z, -1.38888888888730564116e-3);
    p = std::fma(p, z, 4.16666666666665929218e-2);
    const double w = z * z;
    return std::fma(w, p, std::fma(z, -0.5, 1.0));
}

// sin(2*pi*x). Argument reduction happens in turns, so it is exact: t and
// r below are computed without rounding error, and sin2pi(k/2) == +-0.
inline double sin2pi_core(double x) noexcept {
    const double t = x - std::nearbyint(x);    // [-1/2, 1/2]
    const double q = std::nearbyint(4.0 * t);  // quadrant, in {-2,...,2}
    const double r = t - 0.25 * q;             // [-1/8, 1/8], exact
    const double th = kTwoPi * r;
    const int qi = static_cast<int>(q);
    double v = (qi & 1) ? cos_small(th) : sin_small(th);
    if (qi < 0 || qi == 2) v = -v;
    return v;
}

// Natural log for positive finite x; a few ulp of libm. Values <= 0 or
// non-finite are not part of the contract (callers screen singular hits).
inline double log_pos_core(double x) noexcept {
    double e_adj = 0.0;
    if (x < kDblMinNormal) {  // subnormal rescue
        x *= 0x1p54;
        e_adj = -54.0;
    }
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    double e = static_cast<double>(static_cast<std::int64_t>(bits >> 52) - 1022) + e_adj;
    double m = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFull) | 0x3FE0000000000000ull);
    if (m < kSqrtHalf) {  // bring m into [sqrt(1/2), sqrt(2))
        m = m + m;
        e -= 1.0;
    }
    const double s = (m - 1.0) / (m + 1.0);  // |s| <= 0.1716
    const double z = s * s;
    double p = 4.34782608695652173913e-2;  // 1/23
    p = std::fma(p, z, 4.76190476190476190476e-2);   // 1/21
    p = std::fma(p, z, 5.26315789473684210526e-2);   // 1/19
    p = std::fma(p, z, 5.88235294117647058824e-2);   // 1/17
    p = std::fma(p, z, 6.66666666666666666667e-2);   // 1/15
    p = std::fma(p, z, 7.69230769230769230769e-2);   // 1/13
    p = std::fma(p, z, 9.09090909090909090909e-2);   // 1/11
    p = std::fma(p, z, 1.11111111111111111111e-1);   // 1/9
    p = std::fma(p, z, 1.42857142857142857143e-1);   // 1/7
    p = std::fma(p, z, 2.0e-1);                      // 1/5
    p = std::fma(p, z, 3.33333333333333333333e-1);   // 1/3
    const double lm = std::fma((s + s) * z, p, s + s);  // log m = 2 atanh s
    return std::fma(e, kLn2Hi, std::fma(e, kLn2Lo, lm));
}

// frac(mult * x); exact for integer mult and x in [0,1).
inline double step_linear_core(double x, double mult) noexcept {
    const double y = mult * x;
    return y - std::floor(y);
}

inline double step_quadratic_core(double x, double a0) noexcept {
    return std::fma(-x, x, a0);
}

// One fiber step of the skew product: x <- a0 + coupling*sin(2 pi omega) - x^2.
inline double viana_fiber_core(double omega, double x, double a0, double coupling) noexcept {
    const double s = sin2pi_core(omega);
    const double drive = std::fma(coupling, s, a0);
    return std::fma(-x, x, drive);
}

}  // namespace nue::kern::detail
