#pragma once

// Monte Carlo estimation of Leb{h > n}, decay-model fitting and the
// polynomial-decay predicate.

#include <cstdint>
#include <span>
#include <vector>

#include "nue/hyperbolic.hpp"
#include "nue/map.hpp"

namespace nue {

struct TailHistogram {
    std::vector<std::int64_t> survivors;  // survivors[n] = #{h > n}, n in [0, horizon]
    std::int64_t total = 0;
    std::int64_t censored = 0;   // samples that never resolved within the horizon
    std::int64_t resampled = 0;  // exact singular hits, redrawn and counted
    std::uint64_t seed = 0;

    std::size_t horizon() const noexcept {
        return survivors.empty() ? 0 : survivors.size() - 1;
    }
    std::vector<double> fractions() const;
    void validate() const;  // throws ContractError on a broken invariant
};

// Counts add; both histograms must share the horizon. Intended for runs over
// disjoint sample blocks.
TailHistogram merge(const TailHistogram& a, const TailHistogram& b);

enum class HWhich { h1, h2 };

// Tail of h over uniformly sampled initial points. Deterministic given the
// seed and independent of the thread count (fixed 2048-sample blocks with
// per-block substreams, merged in block order).
TailHistogram sample_tail(const MapSystem& map, HWhich which, const HyperbolicParams& params,
                          std::size_t horizon, std::size_t samples, std::uint64_t seed,
                          unsigned threads = 1);

// Same sampler over caller-provided initial points (consistency tests).
TailHistogram sample_tail_points(const MapSystem& map, HWhich which,
                                 const HyperbolicParams& params, std::size_t horizon,
                                 std::span<const Point> points, std::uint64_t seed);

enum class DecayModel { polynomial, exponential, stretched };

struct DecayFit {
    DecayModel model = DecayModel::polynomial;
    double C = 0.0;      // prefactor
    double gamma = 0.0;  // polynomial exponent
    double c = 0.0;      // exponential / stretched rate
    double eta = 0.0;    // stretched exponent
    long window_lo = 0;
    long window_hi = 0;
    double residual = 0.0;  // rms residual in the transformed coordinates
    double r2 = 0.0;
    double stderr_gamma = 0.0;
    double stderr_c = 0.0;
    double stderr_eta = 0.0;
    std::size_t points = 0;
};

struct FitWindow {
    long lo = 0;
    long hi = 0;
};

// Least squares in transformed coordinates: log u vs log n (polynomial),
// log u vs n (exponential), log u vs n^eta with eta chosen by golden-section
// (stretched). u is indexed by n directly; entries <= 0 in the window are
// skipped. Throws UnderdeterminedError with fewer than 5 usable points.
DecayFit fit_decay(std::span<const double> u, FitWindow window, DecayModel model);

// Histogram overload. The window starts at n_lo, ends at the last n with
// survivors >= min_survivors, and skips the pure-censoring plateau
// (survivors == censored).
DecayFit fit_decay(const TailHistogram& hist, DecayModel model, long min_survivors = 30,
                   long n_lo = 5);

struct PolyDecayCheck {
    bool ok = false;  // C stays below the cap
    double C = 0.0;   // smallest constant with u_k <= C u_n for n/2 <= k <= n
};

// u must be strictly positive on [1, horizon].
PolyDecayCheck polynomial_decay_check(std::span<const double> u, long horizon,
                                      double cap = 1e6);

}  // namespace nue
