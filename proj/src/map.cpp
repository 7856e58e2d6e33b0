#include "nue/map.hpp"

#include <algorithm>
#include <cmath>

#include "nue/detail/kernel_core.hpp"
#include "nue/kernels.hpp"
#include "nue/numeric.hpp"
#include "nue/parallel.hpp"
#include "nue/rng.hpp"

namespace nue {

std::string map_kind_name(MapKind k) {
    switch (k) {
        case MapKind::doubling: return "doubling";
        case MapKind::ternary: return "ternary";
        case MapKind::quadratic: return "quadratic";
        case MapKind::viana: return "viana";
        case MapKind::cubic: return "cubic";
        case MapKind::synthetic: return "synthetic";
    }
    return "?";
}

MapKind map_kind_from_name(const std::string& name) {
    if (name == "doubling") return MapKind::doubling;
    if (name == "ternary") return MapKind::ternary;
    if (name == "quadratic") return MapKind::quadratic;
    if (name == "viana") return MapKind::viana;
    if (name == "cubic") return MapKind::cubic;
    if (name == "synthetic") return MapKind::synthetic;
    throw ConfigError("unknown map kind: " + name);
}

double misiurewicz_a0() {
    static const double root = [] {
        auto g = [](double a) {
            const double f2 = a - a * a;                       // second image of 0
            const double p = 0.5 * (std::sqrt(1.0 + 4.0 * a) - 1.0);  // positive fixed point
            return f2 + p;
        };
        return bisect_root(g, 1.4, 1.7, 1e-14);
    }();
    return root;
}

MapSystem make_doubling() {
    MapSystem m;
    m.kind = MapKind::doubling;
    m.circle = true;
    m.domain = {0.0, 1.0};
    m.lambda_floor = std::log(2.0);
    m.B = 2.0;
    m.beta = 1.0;
    return m;
}

MapSystem make_ternary() {
    MapSystem m;
    m.kind = MapKind::ternary;
    m.circle = true;
    m.domain = {0.0, 1.0};
    m.lambda_floor = std::log(3.0);
    m.B = 3.0;
    m.beta = 1.0;
    return m;
}

MapSystem make_quadratic(std::optional<double> a0, std::optional<Interval> interval) {
    MapSystem m;
    m.kind = MapKind::quadratic;
    m.circle = false;
    m.a0 = a0.value_or(misiurewicz_a0());
    // (1, 2]: the endpoint a0 = 2 (full invariant interval [-2, 2]) is allowed
    if (m.a0 <= 1.0 || m.a0 > 2.0) throw ConfigError("quadratic a0 must lie in (1,2]");
    // invariant core [a0 - a0^2, a0]
    m.domain = interval.value_or(Interval{m.a0 - m.a0 * m.a0, m.a0});
    m.lambda_floor = 0.3;  // conservative floor; estimate_lambda measures the real one
    const double mx = std::max(std::fabs(m.domain.lo), std::fabs(m.domain.hi));
    m.B = std::max(2.0, 2.0 * mx * mx);
    m.beta = 1.0;
    return m;
}

MapSystem make_viana(std::optional<double> a0, double coupling, int base_mult,
                     std::optional<Interval> fiber) {
    if (base_mult != 16 && base_mult != 2)
        throw ConfigError("viana base multiplier must be 16 or 2");
    if (coupling < 0.0) throw ConfigError("viana coupling must be >= 0");
    MapSystem m;
    m.kind = MapKind::viana;
    m.circle = true;
    m.a0 = a0.value_or(misiurewicz_a0());
    if (m.a0 <= 1.0 || m.a0 >= 2.0) throw ConfigError("viana a0 must lie in (1,2)");
    m.coupling = coupling;
    m.base_mult = base_mult;
    // fiber interval with room for the sin forcing on both sides
    m.domain = fiber.value_or(
        Interval{m.a0 - m.a0 * m.a0 - 10.0 * coupling, m.a0 + 2.0 * coupling});
    if (m.domain.lo <= -2.0 || m.domain.hi >= 2.0)
        throw ConfigError("viana fiber interval must be compact in (-2,2)");
    m.lambda_floor = 0.3;
    const double mx = std::max(std::fabs(m.domain.lo), std::fabs(m.domain.hi));
    m.B = std::max(2.0, 2.0 * mx * mx);
    m.beta = 1.0;
    // forward invariance, checked on a grid: every image must stay interior
    const int g = 64;
    for (int i = 0; i <= g; ++i) {
        for (int j = 0; j <= g; ++j) {
            const double omega = static_cast<double>(i) / (g + 1);
            const double x = m.domain.lo + m.domain.length() * j / g;
            const double img = kern::detail::viana_fiber_core(omega, x, m.a0, m.coupling);
            if (img <= m.domain.lo || img >= m.domain.hi)
                throw ConfigError("viana fiber interval is not forward invariant");
        }
    }
    return m;
}

MapSystem make_cubic() {
    MapSystem m;
    m.kind = MapKind::cubic;
    m.circle = false;
    m.domain = {-1.0, 1.0};
    m.lambda_floor = 0.0;
    m.B = 3.0;
    m.beta = 2.0;
    return m;
}

MapSystem make_synthetic(SyntheticTrace trace) {
    const std::size_t n = trace.a.size();
    if (trace.r.size() != trace.delta_levels.size())
        throw ConfigError("synthetic trace: one r array per delta level required");
    for (const auto& row : trace.r)
        if (row.size() != n) throw ConfigError("synthetic trace: ragged r arrays");
    MapSystem m;
    m.kind = MapKind::synthetic;
    m.circle = false;
    m.domain = {0.0, 1.0};
    m.lambda_floor = 0.0;
    m.synthetic = std::make_shared<const SyntheticTrace>(std::move(trace));
    return m;
}

bool in_domain(const MapSystem& map, const Point& p) noexcept {
    if (map.skew()) {
        if (p.dim != 2) return false;
        return p.first >= 0.0 && p.first < 1.0 && map.domain.contains(p.second);
    }
    if (p.dim != 1) return false;
    if (map.circle) return p.first >= 0.0 && p.first < 1.0;
    return map.domain.contains(p.first);
}

Point step(const MapSystem& map, const Point& p) {
    if (!in_domain(map, p)) throw DomainError("step: point outside the map domain");
    switch (map.kind) {
        case MapKind::doubling:
            return Point::one_d(kern::detail::step_linear_core(p.first, 2.0));
        case MapKind::ternary:
            return Point::one_d(kern::detail::step_linear_core(p.first, 3.0));
        case MapKind::quadratic:
            return Point::one_d(kern::detail::step_quadratic_core(p.first, map.a0));
        case MapKind::cubic:
            return Point::one_d(p.first * p.first * p.first);
        case MapKind::viana: {
            const double omega =
                kern::detail::step_linear_core(p.first, static_cast<double>(map.base_mult));
            const double x =
                kern::detail::viana_fiber_core(p.first, p.second, map.a0, map.coupling);
            return Point::skew(omega, x);
        }
        case MapKind::synthetic:
            throw DomainError("synthetic map has no pointwise dynamics");
    }
    throw DomainError("unreachable map kind");
}

double derivative_abs(const MapSystem& map, const Point& p) {
    switch (map.kind) {
        case MapKind::doubling: return 2.0;
        case MapKind::ternary: return 3.0;
        case MapKind::quadratic: return 2.0 * std::fabs(p.first);
        case MapKind::cubic: return 3.0 * p.first * p.first;
        case MapKind::viana: return 2.0 * std::fabs(p.second);
        case MapKind::synthetic:
            throw DomainError("synthetic map has no pointwise derivative");
    }
    throw DomainError("unreachable map kind");
}

double coexpansion(const MapSystem& map, const Point& p) {
    switch (map.kind) {
        case MapKind::doubling: return std::log(2.0);
        case MapKind::ternary: return std::log(3.0);
        case MapKind::quadratic:
        case MapKind::cubic:
        case MapKind::viana: {
            const double d = derivative_abs(map, p);
            if (d == 0.0)
                throw SingularityError(0, "coexpansion evaluated exactly on the singular set");
            return kern::log_pos(d);
        }
        case MapKind::synthetic:
            throw DomainError("synthetic map has no pointwise derivative");
    }
    throw DomainError("unreachable map kind");
}

double dist_to_singular(const MapSystem& map, const Point& p) {
    if (map.singular_set_empty()) return 1.0;  // empty-S convention, capped
    if (map.kind == MapKind::viana) return std::fabs(p.second);
    return std::fabs(p.first);  // S = {0} for quadratic/cubic
}

std::pair<double, std::vector<double>> distances(const MapSystem& map, const Point& p,
                                                 const std::vector<double>& deltas) {
    for (double d : deltas)
        if (!(d > 0.0 && d < 1.0)) throw DomainError("distances: delta must lie in (0,1)");
    const double dist = dist_to_singular(map, p);
    std::vector<double> trunc(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i)
        trunc[i] = dist < deltas[i] ? dist : 1.0;
    return {dist, trunc};
}

InvarianceReport check_viana_invariance(const MapSystem& map, std::size_t points,
                                        std::size_t steps, std::uint64_t seed,
                                        unsigned threads) {
    if (map.kind != MapKind::viana) throw DomainError("invariance scan is a viana check");
    const int shift = map.base_mult == 16 ? 4 : 1;
    constexpr std::size_t kBlock = 4096;
    const std::size_t blocks = (points + kBlock - 1) / kBlock;
    std::vector<double> lo(blocks), hi(blocks);

    parallel_for(blocks, threads, [&](std::size_t bi) {
        const std::size_t count = std::min(kBlock, points - bi * kBlock);
        std::uint64_t bseed = block_seed(seed, bi);
        std::uint64_t sm = bseed;
        std::vector<std::uint64_t> base(count), rng(count);
        std::vector<double> x(count);
        for (std::size_t i = 0; i < count; ++i) {
            base[i] = splitmix64(sm) & ((1ull << 52) - 1);
            rng[i] = lane_seed(bseed, i);
            x[i] = map.domain.lo + map.domain.length() * to_unit(splitmix64(sm));
        }
        double mn = map.domain.hi, mx = map.domain.lo;
        for (std::size_t s = 0; s < steps; ++s) {
            kern::viana_step(base.data(), rng.data(), x.data(), nullptr, count, map.a0,
                             map.coupling, shift);
            for (std::size_t i = 0; i < count; ++i) {
                mn = std::min(mn, x[i]);
                mx = std::max(mx, x[i]);
            }
        }
        lo[bi] = mn;
        hi[bi] = mx;
    });

    InvarianceReport rep;
    rep.points = points;
    rep.steps = steps;
    rep.min_seen = *std::min_element(lo.begin(), lo.end());
    rep.max_seen = *std::max_element(hi.begin(), hi.end());
    rep.invariant = rep.min_seen >= map.domain.lo && rep.max_seen <= map.domain.hi;
    return rep;
}

}  // namespace nue
