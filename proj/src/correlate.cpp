#include "nue/correlate.hpp"

#include <algorithm>
#include <cmath>

#include "nue/numeric.hpp"
#include "nue/orbit_engine.hpp"
#include "nue/rng.hpp"

namespace nue {

Observable Observable::coordinate_minus_half() {
    Observable o;
    o.kind = ObservableKind::coordinate_minus_half;
    return o;
}

Observable Observable::indicator(Interval cell) {
    Observable o;
    o.kind = ObservableKind::indicator;
    o.cell = cell;
    o.holder_exponent = 1.0;  // indicators are only bounded; recorded for the g slot
    return o;
}

Observable Observable::user(std::vector<std::pair<double, double>> table,
                            double holder_exponent) {
    if (table.size() < 2) throw ContractError("user observable needs at least 2 table rows");
    std::sort(table.begin(), table.end());
    for (std::size_t i = 1; i < table.size(); ++i)
        if (table[i].first == table[i - 1].first)
            throw ContractError("user observable: duplicate abscissa");
    Observable o;
    o.kind = ObservableKind::lipschitz_user;
    o.table = std::move(table);
    o.holder_exponent = holder_exponent;
    return o;
}

double Observable::lipschitz_estimate() const {
    if (kind != ObservableKind::lipschitz_user) return kind == ObservableKind::indicator ? 0.0 : 1.0;
    double worst = 0.0;
    for (std::size_t i = 1; i < table.size(); ++i) {
        const double dx = table[i].first - table[i - 1].first;
        worst = std::max(worst, std::fabs(table[i].second - table[i - 1].second) / dx);
    }
    return worst;
}

double Observable::eval(double coord) const noexcept {
    switch (kind) {
        case ObservableKind::coordinate_minus_half:
            return coord - 0.5;
        case ObservableKind::indicator:
            return coord >= cell.lo && coord < cell.hi ? 1.0 : 0.0;
        case ObservableKind::lipschitz_user: {
            if (coord <= table.front().first) return table.front().second;
            if (coord >= table.back().first) return table.back().second;
            std::size_t lo = 0, hi = table.size() - 1;
            while (hi - lo > 1) {
                const std::size_t mid = (lo + hi) / 2;
                (table[mid].first <= coord ? lo : hi) = mid;
            }
            const double t = (coord - table[lo].first) / (table[hi].first - table[lo].first);
            return table[lo].second + t * (table[hi].second - table[lo].second);
        }
    }
    return 0.0;
}

namespace {

// Orbit coordinate series; restarts on exact singular hits.
std::vector<double> coordinate_series(const MapSystem& map, std::size_t length,
                                      std::uint64_t seed, std::size_t* resampled) {
    std::vector<double> series(length);
    std::uint64_t sm = seed;
    for (int attempt = 0;; ++attempt) {
        Point x0;
        if (map.skew())
            x0 = Point::skew(to_unit(splitmix64(sm)),
                             map.domain.lo + map.domain.length() * to_unit(splitmix64(sm)));
        else if (map.circle)
            x0 = Point::one_d(to_unit(splitmix64(sm)));
        else
            x0 = Point::one_d(map.domain.lo + map.domain.length() * to_unit(splitmix64(sm)));
        OrbitEngine eng(map, x0, splitmix64(sm));
        bool ok = true;
        for (std::size_t t = 0; t < length; ++t) {
            series[t] = eng.coordinate();
            if (!map.singular_set_empty() && dist_to_singular(map, eng.point()) == 0.0) {
                ok = false;
                break;
            }
            eng.advance();
        }
        if (ok) return series;
        if (resampled) ++*resampled;
        if (attempt > 100) throw ContractError("correlate: persistent singular hits");
    }
}

}  // namespace

std::vector<CorrPoint> correlate(const MapSystem& map, const Observable& f,
                                 const Observable& g, std::size_t n_max, std::size_t samples,
                                 std::size_t burn_in, std::uint64_t seed, std::size_t blocks,
                                 std::size_t* resampled) {
    if (samples < 100) throw ContractError("correlate: samples must be >= 100");
    if (blocks < 2) throw ContractError("correlate: at least 2 jackknife blocks");
    if (blocks > samples) blocks = samples;

    const std::size_t length = burn_in + samples + n_max;
    const std::vector<double> series = coordinate_series(map, length, seed, resampled);

    std::vector<double> fv(samples), gv(samples + n_max);
    for (std::size_t t = 0; t < samples; ++t) fv[t] = f.eval(series[burn_in + t]);
    for (std::size_t t = 0; t < samples + n_max; ++t) gv[t] = g.eval(series[burn_in + t]);

    // per-block partial sums: Sf_b, and per lag Sg_b(n), Sfg_b(n)
    const std::size_t bs = samples / blocks;  // last block absorbs the remainder
    auto block_of = [&](std::size_t t) { return std::min(t / bs, blocks - 1); };
    std::vector<double> sf(blocks, 0.0);
    std::vector<std::size_t> bn(blocks, 0);
    std::vector<std::vector<double>> sg(n_max + 1, std::vector<double>(blocks, 0.0));
    std::vector<std::vector<double>> sfg(n_max + 1, std::vector<double>(blocks, 0.0));

    std::vector<NeumaierSum> sg_acc(blocks), sfg_acc(blocks);
    for (std::size_t n = 0; n <= n_max; ++n) {
        for (auto& acc : sg_acc) acc.reset();
        for (auto& acc : sfg_acc) acc.reset();
        for (std::size_t t = 0; t < samples; ++t) {
            const std::size_t b = block_of(t);
            sg_acc[b].add(gv[t + n]);
            sfg_acc[b].add(fv[t] * gv[t + n]);
        }
        for (std::size_t b = 0; b < blocks; ++b) {
            sg[n][b] = sg_acc[b].value();
            sfg[n][b] = sfg_acc[b].value();
        }
    }
    {
        std::vector<NeumaierSum> sf_acc(blocks);
        for (std::size_t t = 0; t < samples; ++t) {
            const std::size_t b = block_of(t);
            sf_acc[b].add(fv[t]);
            ++bn[b];
        }
        for (std::size_t b = 0; b < blocks; ++b) sf[b] = sf_acc[b].value();
    }

    auto cor_from = [&](double sum_f, double sum_g, double sum_fg, double m) {
        const double mf = sum_f / m;
        const double mg = sum_g / m;
        return sum_fg / m - mf * mg;
    };

    std::vector<CorrPoint> out(n_max + 1);
    const double m_all = static_cast<double>(samples);
    for (std::size_t n = 0; n <= n_max; ++n) {
        double tf = 0.0, tg = 0.0, tfg = 0.0;
        for (std::size_t b = 0; b < blocks; ++b) {
            tf += sf[b];
            tg += sg[n][b];
            tfg += sfg[n][b];
        }
        out[n].cor = cor_from(tf, tg, tfg, m_all);
        // delete-one-block jackknife
        double mean_jk = 0.0;
        std::vector<double> theta(blocks);
        for (std::size_t b = 0; b < blocks; ++b) {
            const double m = m_all - static_cast<double>(bn[b]);
            theta[b] = cor_from(tf - sf[b], tg - sg[n][b], tfg - sfg[n][b], m);
            mean_jk += theta[b];
        }
        mean_jk /= static_cast<double>(blocks);
        double var = 0.0;
        for (std::size_t b = 0; b < blocks; ++b)
            var += (theta[b] - mean_jk) * (theta[b] - mean_jk);
        const double bd = static_cast<double>(blocks);
        out[n].stderr_ = std::sqrt(std::max(0.0, (bd - 1.0) / bd * var));
    }
    return out;
}

std::vector<double> invariant_histogram(const MapSystem& map, const Point& x0,
                                        std::size_t length, std::size_t bins,
                                        std::size_t burn_in) {
    if (bins < 1) throw ContractError("invariant_histogram: bins must be >= 1");
    if (length < bins * 100)
        throw ContractError("invariant_histogram: length must be >= bins * 100");

    Interval range = map.skew() || !map.circle ? map.domain : Interval{0.0, 1.0};
    std::uint64_t sm = std::bit_cast<std::uint64_t>(x0.first) ^ 0x243F6A8885A308D3ull;
    OrbitEngine eng(map, x0, splitmix64(sm));
    for (std::size_t t = 0; t < burn_in; ++t) eng.advance();

    std::vector<std::int64_t> counts(bins, 0);
    for (std::size_t t = 0; t < length; ++t) {
        const double c = eng.coordinate();
        double u = (c - range.lo) / range.length();
        if (u < 0.0) u = 0.0;
        std::size_t bin = static_cast<std::size_t>(u * static_cast<double>(bins));
        if (bin >= bins) bin = bins - 1;
        ++counts[bin];
        eng.advance();
    }
    std::vector<double> density(bins);
    for (std::size_t i = 0; i < bins; ++i)
        density[i] = static_cast<double>(counts[i]) * static_cast<double>(bins) /
                     static_cast<double>(length);
    return density;
}

}  // namespace nue
