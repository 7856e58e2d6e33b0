#pragma once

// Exact sequence machinery: convolution, the subadditivity threshold for
// stretched-exponential tails, the gamma(eta) lower bound, generating-series
// coefficients of the forbidden-time recurrence, and tail sums. All
// accumulation is Neumaier-compensated; magnitudes span hundreds of orders.

#include <cstddef>
#include <vector>

#include "nue/errors.hpp"

namespace nue {

struct Seq {
    std::vector<double> values;  // indexed from 0, all entries >= 0

    Seq() = default;
    explicit Seq(std::vector<double> v);
    std::size_t horizon() const noexcept { return values.size(); }
    double at(std::size_t n) const noexcept { return n < values.size() ? values[n] : 0.0; }

    // values[n] = C exp(-c n^eta), n in [0, horizon)
    static Seq stretched(double c, double eta, std::size_t horizon, double C = 1.0);
    // values[n] = C n^-gamma for n >= 1, values[0] = cap
    static Seq polynomial(double gamma, std::size_t horizon, double C = 1.0, double cap = 1.0);
};

// Full finite-support convolution (length |w1| + |w2| - 1). Entries with
// index >= min horizon assume the stored arrays carry the entire support.
Seq convolve(const Seq& w1, const Seq& w2);

struct SubadditiveThreshold {
    long k_min = 0;    // smallest K with (w*w)_p <= w_p for all p <= horizon
    long k_paper = 0;  // smallest K with 2C sum_{j>=K} exp(-c gamma j^eta) <= 1
    double gamma = 0.0;
};

// w_n = 1_{n>=K} C exp(-c n^eta). eta must lie strictly inside (0,1); the
// bound degenerates at eta = 1 (gamma(1) = 0) and the call is rejected.
SubadditiveThreshold subadditive_threshold(double c, double eta, double C, long horizon);

// min over a 1e6-point grid on (0, 1/2] of (x^eta + (1-x)^eta - 1)/x^eta.
double gamma_eta(double eta);
// The endpoint value 2 - 2^eta, logged as a cross-check only.
double gamma_eta_endpoint(double eta);

struct GenSeries {
    Seq coeffs;
    double decay_rate = 0.0;  // reciprocal of the smallest positive root
    double root = 0.0;        // smallest positive root of 1 - l z - C l^R z^R
};

// Coefficients of C5 l^R z^R / (1 - l z - C5 l^R z^R) by linear recurrence,
// with the dominant decay rate bisected to 1e-12. Requires l + C5 l^R < 1.
GenSeries gen_series_coeffs(double C5, double lam2, long R, std::size_t n);

// sum_{p=n}^{horizon-1} w_p, accumulated from the far end so that
// tail_sum(w,n) is consistent with w_n + tail_sum(w,n+1).
double tail_sum(const Seq& w, std::size_t n);

// Integral-comparison envelope n^(1-eta) exp(-c (n/2)^eta) for diagnostics.
double stretched_tail_envelope(double c, double eta, double n);

}  // namespace nue
