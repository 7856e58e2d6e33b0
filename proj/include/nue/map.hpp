#pragma once

// Catalog of concrete nonuniformly expanding systems. Each map carries its
// expansion floor lambda, the nondegeneracy pair (B, beta) and its singular
// set; orbit statistics are built from these in trace.hpp.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nue/errors.hpp"

namespace nue {

enum class MapKind { doubling, ternary, quadratic, viana, cubic, synthetic };

std::string map_kind_name(MapKind k);
MapKind map_kind_from_name(const std::string& name);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    double clamp(double x) const noexcept { return x < lo ? lo : (x > hi ? hi : x); }
};

struct Point {
    double first = 0.0;   // circle/interval coordinate
    double second = 0.0;  // fiber coordinate, skew products only
    int dim = 1;
    static Point one_d(double x) noexcept { return {x, 0.0, 1}; }
    static Point skew(double omega, double x) noexcept { return {omega, x, 2}; }
};

// Trace data supplied directly instead of being generated by a map.
struct SyntheticTrace {
    std::vector<double> a;
    std::vector<double> delta_levels;
    std::vector<std::vector<double>> r;  // r[level][k], same length as a
};

struct MapSystem {
    MapKind kind = MapKind::doubling;
    double a0 = 0.0;        // quadratic / viana parameter
    double coupling = 0.0;  // viana coupling epsilon_c
    int base_mult = 16;     // viana base multiplier, 16 or 2
    bool circle = true;     // first coordinate lives on S^1
    Interval domain;        // 1D domain, or the fiber interval for viana
    double lambda_floor = 0.0;  // lambda of the expansion condition
    double B = 2.0;             // nondegeneracy constant, > 1
    double beta = 1.0;          // nondegeneracy exponent, > 0
    std::shared_ptr<const SyntheticTrace> synthetic;

    bool skew() const noexcept { return kind == MapKind::viana; }
    bool singular_set_empty() const noexcept {
        return kind == MapKind::doubling || kind == MapKind::ternary ||
               kind == MapKind::synthetic;
    }
    // integer slope for the piecewise-linear circle maps, 0 otherwise
    int linear_slope() const noexcept {
        if (kind == MapKind::doubling) return 2;
        if (kind == MapKind::ternary) return 3;
        return 0;
    }
};

// The default quadratic parameter: the critical orbit of x -> a - x^2 lands
// on the orientation-reversing fixed point after two steps. Root of
// a - a^2 = -p(a) with p(a) = (sqrt(1+4a) - 1)/2, bisected to 1e-14 and
// cached; equals the real root of a^3 - 2a^2 + 2a - 2.
double misiurewicz_a0();

MapSystem make_doubling();
MapSystem make_ternary();
MapSystem make_quadratic(std::optional<double> a0 = std::nullopt,
                         std::optional<Interval> interval = std::nullopt);
MapSystem make_viana(std::optional<double> a0 = std::nullopt, double coupling = 0.01,
                     int base_mult = 16, std::optional<Interval> fiber = std::nullopt);
// |T'| = 3x^2 with a flat critical point; exists to exercise the
// nondegeneracy failure path.
MapSystem make_cubic();
MapSystem make_synthetic(SyntheticTrace trace);

bool in_domain(const MapSystem& map, const Point& p) noexcept;

// One application of T. Throws DomainError if p is outside the domain.
Point step(const MapSystem& map, const Point& p);

// log of the co-expansion at p: log|T'| for 1D maps, log(2|x|) for the
// viana fiber. Throws SingularityError if p lies exactly on S.
double coexpansion(const MapSystem& map, const Point& p);

// |T'(p)| (fiber derivative for viana); 0 exactly on S.
double derivative_abs(const MapSystem& map, const Point& p);

// Distance to the singular set; 1 (capped) when S is empty.
double dist_to_singular(const MapSystem& map, const Point& p);

// (dist, dist_delta per level); each delta must lie in (0,1).
std::pair<double, std::vector<double>> distances(const MapSystem& map, const Point& p,
                                                 const std::vector<double>& deltas);

struct InvarianceReport {
    bool invariant = true;
    double min_seen = 0.0;
    double max_seen = 0.0;
    std::size_t points = 0;
    std::size_t steps = 0;
};

// Monte Carlo forward-invariance scan of the viana fiber interval:
// iterates `points` random initial conditions for `steps` steps and records
// the fiber range seen. Uses the digit-stream base, so no orbit collapses.
InvarianceReport check_viana_invariance(const MapSystem& map, std::size_t points,
                                        std::size_t steps, std::uint64_t seed,
                                        unsigned threads = 1);

}  // namespace nue
