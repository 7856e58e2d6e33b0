#pragma once

// Orbit traces: the per-step arrays a_k = log|T'(T^k x)| (co-expansion) and
// r_k(delta) = -log dist_delta(T^k x, S) that the expansion and recurrence
// conditions are built from.

#include <cstdint>
#include <optional>
#include <vector>

#include "nue/map.hpp"

namespace nue {

struct OrbitTrace {
    Point x0;
    std::size_t length = 0;
    std::vector<double> delta_levels;
    std::vector<double> a;                // a[k], k < length
    std::vector<std::vector<double>> r;   // r[level][k]

    bool has_level(double delta) const noexcept;
    // Throws ConfigError when the level is missing.
    const std::vector<double>& r_for(double delta) const;
};

// Iterates the orbit of x0 for n steps. The viana base coordinate runs on a
// 52-bit digit stream (seeded from the bits of x0), so traces sample a
// Lebesgue-typical point whose base-16 expansion extends x0's prefix; plain
// double iteration of x16 mod 1 would hit an exact dyadic after ~13 steps.
// Throws SingularityError (with the step index) if the orbit lands on S.
OrbitTrace orbit_trace(const MapSystem& map, const Point& x0, std::size_t n,
                       const std::vector<double>& deltas);

// Assemble a trace directly from arrays (synthetic inputs and tests).
OrbitTrace trace_from_arrays(std::vector<double> a, std::vector<double> delta_levels,
                             std::vector<std::vector<double>> r);

// Digit-stream seed derived from the point itself, so that every consumer
// (traces, tail sampling) sees the same extension of x0's digit expansion.
std::uint64_t orbit_digit_seed(const Point& p) noexcept;

struct LambdaEstimate {
    double value = 0.0;
    bool expanding = false;
    std::size_t resampled = 0;
    double quantile = 0.05;
};

// Empirical lower estimate of lambda: a low quantile of (1/n) sum a_k over
// uniformly sampled initial points. Exact-singular orbits are resampled and
// counted. Deterministic given the seed, independent of thread count.
LambdaEstimate estimate_lambda(const MapSystem& map, std::size_t samples, std::size_t n,
                               std::uint64_t seed, double quantile = 0.05,
                               unsigned threads = 1);

struct NondegeneracyReport {
    double beta_used = 1.0;
    bool b_finite = true;       // false: B grows without bound as the grid refines
    double B_fit = 0.0;         // smallest B over the scan grid
    double B_fit_refined = 0.0; // same at 4x resolution, for the divergence test
    double lipschitz_B_fit = 0.0;
    std::vector<Point> worst_points;
};

// Fits the smallest nondegeneracy constant B on a grid and the smallest
// Lipschitz constant for the log-derivative over nearby pairs.
NondegeneracyReport nondegeneracy_scan(const MapSystem& map, double beta, std::size_t grid);

// Largest delta from `candidates` (descending dyadic scan by default) whose
// empirical recurrence average (1/n) sum r_k(delta) stays <= eps across all
// sampled orbits; nullopt when even the smallest candidate fails.
std::optional<double> calibrate_delta(const MapSystem& map, double eps, std::size_t samples,
                                      std::size_t n, std::uint64_t seed,
                                      std::vector<double> candidates = {});

}  // namespace nue
