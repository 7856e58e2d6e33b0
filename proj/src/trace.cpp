#include "nue/trace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "nue/kernels.hpp"
#include "nue/numeric.hpp"
#include "nue/orbit_engine.hpp"
#include "nue/parallel.hpp"
#include "nue/rng.hpp"

namespace nue {

std::uint64_t orbit_digit_seed(const Point& p) noexcept {
    std::uint64_t s = std::bit_cast<std::uint64_t>(p.first) ^
                      (std::bit_cast<std::uint64_t>(p.second) << 1) ^ 0x6A09E667F3BCC909ull;
    return splitmix64(s);
}

bool OrbitTrace::has_level(double delta) const noexcept {
    for (double d : delta_levels)
        if (d == delta) return true;
    return false;
}

const std::vector<double>& OrbitTrace::r_for(double delta) const {
    for (std::size_t i = 0; i < delta_levels.size(); ++i)
        if (delta_levels[i] == delta) return r[i];
    throw ConfigError("trace does not carry the requested delta level");
}

OrbitTrace orbit_trace(const MapSystem& map, const Point& x0, std::size_t n,
                       const std::vector<double>& deltas) {
    for (double d : deltas)
        if (!(d > 0.0 && d < 1.0)) throw DomainError("orbit_trace: delta must lie in (0,1)");

    OrbitTrace t;
    t.x0 = x0;
    t.length = n;
    t.delta_levels = deltas;
    t.a.reserve(n);
    t.r.assign(deltas.size(), {});
    for (auto& row : t.r) row.reserve(n);

    if (map.kind == MapKind::synthetic) {
        const auto& syn = *map.synthetic;
        if (n > syn.a.size())
            throw ContractError("synthetic trace shorter than the requested horizon");
        t.a.assign(syn.a.begin(), syn.a.begin() + static_cast<long>(n));
        for (std::size_t li = 0; li < deltas.size(); ++li) {
            std::size_t src = 0;
            bool found = false;
            for (; src < syn.delta_levels.size(); ++src)
                if (syn.delta_levels[src] == deltas[li]) {
                    found = true;
                    break;
                }
            if (!found) throw ConfigError("synthetic trace misses a requested delta level");
            t.r[li].assign(syn.r[src].begin(), syn.r[src].begin() + static_cast<long>(n));
        }
        return t;
    }

    OrbitEngine eng(map, x0, orbit_digit_seed(x0));
    for (std::size_t k = 0; k < n; ++k) {
        const Point p = eng.point();
        const double dist = dist_to_singular(map, p);
        if (dist == 0.0) throw SingularityError(k, "orbit landed exactly on the singular set");
        t.a.push_back(coexpansion(map, p));
        for (std::size_t li = 0; li < deltas.size(); ++li) {
            const double dd = dist < deltas[li] ? dist : 1.0;
            t.r[li].push_back(dd < 1.0 ? -kern::log_pos(dd) : 0.0);
        }
        eng.advance();
    }
    return t;
}

OrbitTrace trace_from_arrays(std::vector<double> a, std::vector<double> delta_levels,
                             std::vector<std::vector<double>> r) {
    if (r.size() != delta_levels.size())
        throw ContractError("trace_from_arrays: one r array per delta level");
    for (const auto& row : r)
        if (row.size() != a.size()) throw ContractError("trace_from_arrays: ragged arrays");
    OrbitTrace t;
    t.length = a.size();
    t.a = std::move(a);
    t.delta_levels = std::move(delta_levels);
    t.r = std::move(r);
    return t;
}

LambdaEstimate estimate_lambda(const MapSystem& map, std::size_t samples, std::size_t n,
                               std::uint64_t seed, double quantile, unsigned threads) {
    if (samples < 1 || n < 1) throw ContractError("estimate_lambda: samples and n must be >= 1");

    LambdaEstimate est;
    est.quantile = quantile;

    if (map.kind == MapKind::synthetic) {
        const auto& syn = *map.synthetic;
        const std::size_t m = std::min(n, syn.a.size());
        if (m == 0) throw ContractError("synthetic trace is empty");
        NeumaierSum s;
        for (std::size_t k = 0; k < m; ++k) s.add(syn.a[k]);
        est.value = s.value() / static_cast<double>(m);
        est.expanding = est.value > 0.0;
        return est;
    }

    constexpr std::size_t kBlock = 2048;
    const std::size_t blocks = (samples + kBlock - 1) / kBlock;
    std::vector<double> averages(samples);
    std::vector<std::size_t> resampled(blocks, 0);

    parallel_for(blocks, threads, [&](std::size_t bi) {
        const std::size_t count = std::min(kBlock, samples - bi * kBlock);
        std::uint64_t bseed = block_seed(seed, bi);
        std::uint64_t sm = bseed;
        for (std::size_t i = 0; i < count; ++i) {
            for (int attempt = 0;; ++attempt) {
                Point x0;
                if (map.skew()) {
                    x0 = Point::skew(to_unit(splitmix64(sm)),
                                     map.domain.lo + map.domain.length() * to_unit(splitmix64(sm)));
                } else if (map.circle) {
                    x0 = Point::one_d(to_unit(splitmix64(sm)));
                } else {
                    x0 = Point::one_d(map.domain.lo + map.domain.length() * to_unit(splitmix64(sm)));
                }
                try {
                    OrbitEngine eng(map, x0, orbit_digit_seed(x0));
                    NeumaierSum s;
                    for (std::size_t k = 0; k < n; ++k) {
                        const Point p = eng.point();
                        if (dist_to_singular(map, p) == 0.0)
                            throw SingularityError(k, "singular hit");
                        s.add(coexpansion(map, p));
                        eng.advance();
                    }
                    averages[bi * kBlock + i] = s.value() / static_cast<double>(n);
                    break;
                } catch (const SingularityError&) {
                    ++resampled[bi];
                    if (attempt > 100)
                        throw ContractError("estimate_lambda: persistent singular hits");
                }
            }
        }
    });

    for (std::size_t c : resampled) est.resampled += c;
    std::vector<double> sorted = averages;
    std::sort(sorted.begin(), sorted.end());
    const double pos = quantile * static_cast<double>(sorted.size() - 1);
    est.value = sorted[static_cast<std::size_t>(std::floor(pos))];
    est.expanding = est.value > 0.0;
    return est;
}

NondegeneracyReport nondegeneracy_scan(const MapSystem& map, double beta, std::size_t grid) {
    if (!(beta > 0.0)) throw ContractError("nondegeneracy_scan: beta must be > 0");
    if (grid < 10) throw ContractError("nondegeneracy_scan: grid must be >= 10");
    if (map.kind == MapKind::synthetic)
        throw DomainError("synthetic map has no pointwise derivative");

    const Interval dom = map.domain;
    auto point_at = [&](double x) {
        return map.skew() ? Point::skew(0.0, x) : Point::one_d(x);
    };

    NondegeneracyReport rep;
    rep.beta_used = beta;

    auto scan_B = [&](std::size_t g, std::vector<Point>* worst) {
        double best = 0.0;
        for (std::size_t i = 0; i < g; ++i) {
            const double x = dom.lo + dom.length() * (static_cast<double>(i) + 0.5) /
                                          static_cast<double>(g);
            const Point p = point_at(x);
            const double d = derivative_abs(map, p);
            if (d == 0.0) continue;
            const double dist = dist_to_singular(map, p);
            const double need = std::max(std::pow(dist, beta) / d, d * std::pow(dist, beta));
            if (need > best) {
                best = need;
                if (worst) {
                    worst->clear();
                    worst->push_back(p);
                }
            }
        }
        return best;
    };

    rep.B_fit = scan_B(grid, &rep.worst_points);
    rep.B_fit_refined = scan_B(grid * 4, nullptr);
    // A bound that keeps growing under refinement has no finite B.
    rep.b_finite = rep.B_fit_refined <= 1.5 * rep.B_fit;

    double blip = 0.0;
    for (std::size_t i = 0; i < grid; ++i) {
        const double x = dom.lo + dom.length() * (static_cast<double>(i) + 0.5) /
                                      static_cast<double>(grid);
        const Point p = point_at(x);
        const double dist = dist_to_singular(map, p);
        if (dist == 0.0) continue;
        const double dx = derivative_abs(map, p);
        if (dx == 0.0) continue;
        for (const double frac : {0.125, 0.25, 0.49}) {
            for (const double sign : {1.0, -1.0}) {
                const double y = x + sign * frac * dist;  // dist(x,y) < dist(x,S)/2
                if (!dom.contains(y)) continue;
                const Point q = point_at(y);
                const double dy = derivative_abs(map, q);
                if (dy == 0.0) continue;
                const double diff = std::fabs(std::log(dx) - std::log(dy));
                blip = std::max(blip, diff * std::pow(dist, beta) / std::fabs(y - x));
            }
        }
    }
    rep.lipschitz_B_fit = blip;
    return rep;
}

std::optional<double> calibrate_delta(const MapSystem& map, double eps, std::size_t samples,
                                      std::size_t n, std::uint64_t seed,
                                      std::vector<double> candidates) {
    if (candidates.empty())
        for (int j = 1; j <= 30; ++j) candidates.push_back(std::ldexp(1.0, -j));
    std::sort(candidates.rbegin(), candidates.rend());

    for (double delta : candidates) {
        double worst = 0.0;
        std::uint64_t sm = seed;
        bool ok = true;
        for (std::size_t s = 0; s < samples && ok; ++s) {
            Point x0;
            if (map.skew())
                x0 = Point::skew(to_unit(splitmix64(sm)),
                                 map.domain.lo + map.domain.length() * to_unit(splitmix64(sm)));
            else if (map.circle)
                x0 = Point::one_d(to_unit(splitmix64(sm)));
            else
                x0 = Point::one_d(map.domain.lo + map.domain.length() * to_unit(splitmix64(sm)));
            try {
                const OrbitTrace t = orbit_trace(map, x0, n, {delta});
                NeumaierSum acc;
                for (double v : t.r[0]) acc.add(v);
                worst = std::max(worst, acc.value() / static_cast<double>(n));
                if (worst > eps) ok = false;
            } catch (const SingularityError&) {
                ok = false;  // treat exact hits as failure for this level
            }
        }
        if (ok && worst <= eps) return delta;
    }
    return std::nullopt;
}

}  // namespace nue
