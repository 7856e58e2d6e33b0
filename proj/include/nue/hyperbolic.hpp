#pragma once

// Hyperbolic times, Pliss-time extraction, super hyperbolic times, the
// censored non-uniformity times h1/h2, the separation time P and the
// Pliss-density combination bound.
//
// Floating-point conventions (tests and oracles mirror them exactly):
//   * window sums accumulate from the anchor backwards, S_k = S_{k-1} + a[n-k];
//   * thresholds are k*L, b*(k*L), (lambda/4)*k, (2 sqrt eps)*k, with
//     L = -log(sigma); prefix thresholds are 0.5*lambda*n and 2*eps*n;
//   * every inequality is evaluated as written, ties satisfy.

#include <cstddef>
#include <span>
#include <vector>

#include "nue/numeric.hpp"
#include "nue/trace.hpp"

namespace nue {

// eps -> delta(eps). Exact table match first, default rule eps^2 otherwise.
struct DeltaRule {
    std::vector<std::pair<double, double>> table;
    double operator()(double eps) const noexcept {
        for (const auto& [e, d] : table)
            if (e == eps) return d;
        return eps * eps;
    }
};

struct HyperbolicParams {
    double sigma = 0.0;   // contraction rate of (9), in (0,1)
    double delta = 0.0;   // recurrence truncation level of (9)
    double b = 0.0;       // recurrence exponent, in (0, min(1/2, 1/(4 beta)))
    double lambda = 0.0;  // expansion floor
    std::vector<double> eps;  // (eps1, eps2[, eps3])
    DeltaRule delta_of_eps;
    double theta1 = 0.5;  // density constant inherited from the Pliss step; an input

    // sigma = exp(-lambda/8), b = min(1/2, 1/(4 beta))/2, eps = (.01,.01,.01),
    // delta = delta_of_eps(eps[0]).
    static HyperbolicParams defaults(double lambda, double beta, std::size_t eps_count = 3);
    void validate(double beta) const;  // throws ConfigError
    // delta levels needed by h1 (first two) / h2 (all three)
    std::vector<double> delta_levels(std::size_t count) const;
};

struct HyperbolicTimeSet {
    std::vector<long> times;        // strictly increasing, within [1, horizon]
    std::vector<bool> super_flags;  // parallel to times
    std::size_t horizon = 0;
    bool is_time(long n) const noexcept;
};

// All (sigma, delta)-hyperbolic times of the trace. Super flags are filled
// when the trace carries the delta(eps1), delta(eps2) levels; they stay
// false otherwise. Throws ConfigError when params.delta is not a trace level.
HyperbolicTimeSet hyperbolic_times(const OrbitTrace& trace, const HyperbolicParams& params);

struct PlissResult {
    std::vector<long> times;
    double density_bound = 0.0;  // (c2 - c1) / (A - c1)
};

// Times p with sum_{s=p-k}^{p-1} a_s >= c1*k for every 1 <= k <= p, plus the
// Pliss density bound. Throws ContractError if some a_i > A or c1 >= c2.
PlissResult pliss_times(std::span<const double> a, double c1, double c2, double A);

// Times satisfying the two-sided window condition (10) for eps1, eps2.
std::vector<long> super_hyperbolic_times(const OrbitTrace& trace,
                                         const HyperbolicParams& params);

struct HittingTime {
    long value = 0;       // meaningful only when !censored
    bool censored = true; // the condition never resolved within the horizon
    long horizon = 0;
};

// Incremental evaluator of the h1/h2 prefix conditions. After n calls to
// step(), good() reports whether (1/n) sum a >= lambda/2 and, per eps entry,
// (1/n) sum r(delta(eps_i)) <= 2 eps_i. Both the trace-based h1/h2 and the
// Monte Carlo tail sampler run on this tracker, so their tie-breaking at the
// floating-point level is identical by construction.
class PrefixConditionTracker {
  public:
    PrefixConditionTracker(double lambda, std::span<const double> eps);
    // a_k and one r_k value per eps entry; returns good(n) for the prefix so far.
    bool step(double a_k, std::span<const double> r_k);
    long steps() const noexcept { return n_; }

  private:
    double lambda_;
    std::vector<double> eps_;
    NeumaierSum sa_;
    std::vector<NeumaierSum> sr_;
    long n_ = 0;
};

// Smallest N with the Birkhoff conditions holding for every n in [N, horizon];
// the paper's "for all n >= N" is necessarily truncated at the horizon.
HittingTime h1_censored(const OrbitTrace& trace, const HyperbolicParams& params);

// Smallest n <= horizon satisfying the three-parameter prefix condition.
HittingTime h2(const OrbitTrace& trace, const HyperbolicParams& params);

// Smallest integer P >= 1 with 1 + 2 sigma^((P-1)/2) <= sigma^(-1/2).
long separation_time(double sigma);

// theta1 + (1 - sqrt(eps1)) + (1 - sqrt(eps2)) - 2; may be <= 0, the caller
// checks positivity.
double theta_bound(double eps1, double eps2, double theta1);

}  // namespace nue
