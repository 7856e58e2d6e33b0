#pragma once

// Correlation decay measurement and empirical invariant densities.
// mu-expectations are approximated by time averages along one long orbit
// (the basin of the acim contains Lebesgue-a.e. point); error bars come
// from a delete-one block jackknife.

#include <cstdint>
#include <vector>

#include "nue/map.hpp"

namespace nue {

enum class ObservableKind { coordinate_minus_half, lipschitz_user, indicator };

struct Observable {
    ObservableKind kind = ObservableKind::coordinate_minus_half;
    double holder_exponent = 1.0;
    Interval cell{0.0, 1.0};  // indicator support
    // user table: sorted (x, f(x)) pairs, evaluated by linear interpolation
    std::vector<std::pair<double, double>> table;

    static Observable coordinate_minus_half();
    static Observable indicator(Interval cell);
    static Observable user(std::vector<std::pair<double, double>> table,
                           double holder_exponent = 1.0);

    // Largest interpolated slope; recorded as the Lipschitz/Hoelder estimate.
    double lipschitz_estimate() const;
    // coord is the observable coordinate of the orbit (fiber for skew maps).
    double eval(double coord) const noexcept;
};

struct CorrPoint {
    double cor = 0.0;
    double stderr_ = 0.0;
};

// Cor(f, g o T^n) for n = 0..n_max. `samples` is the number of time points
// in the average; the orbit has burn_in + samples + n_max steps. Exact
// singular hits restart the orbit with a fresh seed and are counted in
// `resampled` when non-null.
std::vector<CorrPoint> correlate(const MapSystem& map, const Observable& f,
                                 const Observable& g, std::size_t n_max,
                                 std::size_t samples, std::size_t burn_in,
                                 std::uint64_t seed, std::size_t blocks = 20,
                                 std::size_t* resampled = nullptr);

// Normalized bin occupation of one orbit after burn-in: values average to 1,
// so a uniform invariant density reads as all bins = 1.
std::vector<double> invariant_histogram(const MapSystem& map, const Point& x0,
                                        std::size_t length, std::size_t bins,
                                        std::size_t burn_in = 1000);

}  // namespace nue
