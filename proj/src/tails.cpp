#include "nue/tails.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "nue/numeric.hpp"
#include "nue/orbit_engine.hpp"
#include "nue/parallel.hpp"
#include "nue/rng.hpp"

namespace nue {

std::vector<double> TailHistogram::fractions() const {
    std::vector<double> f(survivors.size());
    for (std::size_t i = 0; i < survivors.size(); ++i)
        f[i] = total > 0 ? static_cast<double>(survivors[i]) / static_cast<double>(total) : 0.0;
    return f;
}

void TailHistogram::validate() const {
    if (survivors.empty()) return;
    if (survivors[0] > total) throw ContractError("tail: survivors[0] exceeds total");
    for (std::size_t i = 1; i < survivors.size(); ++i)
        if (survivors[i] > survivors[i - 1])
            throw ContractError("tail: survivors must be nonincreasing");
    if (censored > survivors.back())
        throw ContractError("tail: censored exceeds the last survivor count");
}

TailHistogram merge(const TailHistogram& a, const TailHistogram& b) {
    if (a.survivors.size() != b.survivors.size())
        throw ContractError("merge: histograms have different horizons");
    TailHistogram out = a;
    for (std::size_t i = 0; i < out.survivors.size(); ++i) out.survivors[i] += b.survivors[i];
    out.total += b.total;
    out.censored += b.censored;
    out.resampled += b.resampled;
    return out;
}

namespace {

struct BlockTally {
    std::vector<std::int64_t> resolved_at;  // index h in [1, horizon]
    std::int64_t censored = 0;
    std::int64_t resampled = 0;
    std::int64_t total = 0;
};

Point draw_point(const MapSystem& map, std::uint64_t& sm) {
    if (map.skew())
        return Point::skew(to_unit(splitmix64(sm)),
                           map.domain.lo + map.domain.length() * to_unit(splitmix64(sm)));
    if (map.circle) return Point::one_d(to_unit(splitmix64(sm)));
    return Point::one_d(map.domain.lo + map.domain.length() * to_unit(splitmix64(sm)));
}

// h1/h2 for one initial point, or nullopt for an exact singular hit.
std::optional<HittingTime> sample_h(const MapSystem& map, HWhich which,
                                    const HyperbolicParams& params,
                                    const std::vector<double>& levels, std::size_t horizon,
                                    const Point& x0) {
    const std::size_t count = levels.size();
    OrbitEngine eng(map, x0, orbit_digit_seed(x0));
    PrefixConditionTracker tracker(params.lambda,
                                   std::span<const double>(params.eps.data(), count));
    std::vector<double> rk(count);
    long last_bad = 0;
    HittingTime res;
    res.horizon = static_cast<long>(horizon);
    bool resolved = false;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const Point p = eng.point();
        const double dist = dist_to_singular(map, p);
        if (dist == 0.0) return std::nullopt;
        const double a_k = coexpansion(map, p);
        for (std::size_t i = 0; i < count; ++i)
            rk[i] = dist < levels[i] ? -kern::log_pos(dist) : 0.0;
        const bool good = tracker.step(a_k, rk);
        if (which == HWhich::h2) {
            if (good) {
                res.value = static_cast<long>(n);
                res.censored = false;
                resolved = true;
                break;
            }
        } else if (!good) {
            last_bad = static_cast<long>(n);
        }
        eng.advance();
    }
    if (which == HWhich::h1) {
        if (last_bad < res.horizon) {
            res.value = last_bad + 1;
            res.censored = false;
        }
    } else if (!resolved) {
        res.censored = true;
    }
    return res;
}

TailHistogram tally_to_histogram(const std::vector<BlockTally>& tallies, std::size_t horizon,
                                 std::uint64_t seed) {
    TailHistogram hist;
    hist.seed = seed;
    std::vector<std::int64_t> resolved(horizon + 1, 0);
    for (const auto& t : tallies) {
        hist.total += t.total;
        hist.censored += t.censored;
        hist.resampled += t.resampled;
        for (std::size_t h = 1; h <= horizon; ++h) resolved[h] += t.resolved_at[h];
    }
    hist.survivors.assign(horizon + 1, 0);
    std::int64_t cum = 0;
    for (std::size_t n = 0; n <= horizon; ++n) {
        if (n >= 1) cum += resolved[n];
        hist.survivors[n] = hist.total - cum;  // censored samples never resolve
    }
    hist.validate();
    return hist;
}

}  // namespace

TailHistogram sample_tail(const MapSystem& map, HWhich which, const HyperbolicParams& params,
                          std::size_t horizon, std::size_t samples, std::uint64_t seed,
                          unsigned threads) {
    if (samples < 1) throw ContractError("sample_tail: samples must be >= 1");
    const std::size_t eps_needed = which == HWhich::h1 ? 2 : 3;
    if (params.eps.size() < eps_needed)
        throw ConfigError("sample_tail: not enough eps entries for the requested h");
    const std::vector<double> levels = params.delta_levels(eps_needed);

    constexpr std::size_t kBlock = 2048;
    const std::size_t blocks = (samples + kBlock - 1) / kBlock;
    std::vector<BlockTally> tallies(blocks);

    parallel_for(blocks, threads, [&](std::size_t bi) {
        BlockTally tally;
        tally.resolved_at.assign(horizon + 1, 0);
        const std::size_t count = std::min(kBlock, samples - bi * kBlock);
        std::uint64_t sm = block_seed(seed, bi);
        for (std::size_t i = 0; i < count; ++i) {
            for (int attempt = 0;; ++attempt) {
                const Point x0 = draw_point(map, sm);
                const auto h = sample_h(map, which, params, levels, horizon, x0);
                if (h) {
                    ++tally.total;
                    if (h->censored)
                        ++tally.censored;
                    else
                        ++tally.resolved_at[static_cast<std::size_t>(h->value)];
                    break;
                }
                ++tally.resampled;
                if (attempt > 100) throw ContractError("sample_tail: persistent singular hits");
            }
        }
        tallies[bi] = std::move(tally);
    });

    return tally_to_histogram(tallies, horizon, seed);
}

TailHistogram sample_tail_points(const MapSystem& map, HWhich which,
                                 const HyperbolicParams& params, std::size_t horizon,
                                 std::span<const Point> points, std::uint64_t seed) {
    const std::size_t eps_needed = which == HWhich::h1 ? 2 : 3;
    if (params.eps.size() < eps_needed)
        throw ConfigError("sample_tail: not enough eps entries for the requested h");
    const std::vector<double> levels = params.delta_levels(eps_needed);

    std::vector<BlockTally> tallies(1);
    BlockTally& tally = tallies[0];
    tally.resolved_at.assign(horizon + 1, 0);
    for (const Point& x0 : points) {
        const auto h = sample_h(map, which, params, levels, horizon, x0);
        if (!h) {
            ++tally.resampled;
            continue;  // caller-provided points are not replaced
        }
        ++tally.total;
        if (h->censored)
            ++tally.censored;
        else
            ++tally.resolved_at[static_cast<std::size_t>(h->value)];
    }
    return tally_to_histogram(tallies, horizon, seed);
}

namespace {

struct FitData {
    std::vector<double> ns;
    std::vector<double> logu;
};

FitData gather(std::span<const double> u, FitWindow window) {
    FitData d;
    const long hi = std::min<long>(window.hi, static_cast<long>(u.size()) - 1);
    for (long n = std::max<long>(window.lo, 1); n <= hi; ++n) {
        if (u[static_cast<std::size_t>(n)] > 0.0) {
            d.ns.push_back(static_cast<double>(n));
            d.logu.push_back(std::log(u[static_cast<std::size_t>(n)]));
        }
    }
    return d;
}

}  // namespace

DecayFit fit_decay(std::span<const double> u, FitWindow window, DecayModel model) {
    const FitData d = gather(u, window);
    if (d.ns.size() < 5)
        throw UnderdeterminedError("fit_decay: fewer than 5 usable points in the window");

    DecayFit fit;
    fit.model = model;
    fit.window_lo = window.lo;
    fit.window_hi = window.hi;
    fit.points = d.ns.size();

    switch (model) {
        case DecayModel::polynomial: {
            std::vector<double> x(d.ns.size());
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::log(d.ns[i]);
            const LinFit lf = linear_fit(x, d.logu);
            fit.gamma = -lf.slope;
            fit.C = std::exp(lf.intercept);
            fit.stderr_gamma = lf.stderr_slope;
            fit.residual = lf.residual_rms;
            fit.r2 = lf.r2;
            break;
        }
        case DecayModel::exponential: {
            const LinFit lf = linear_fit(d.ns, d.logu);
            fit.c = -lf.slope;
            fit.C = std::exp(lf.intercept);
            fit.stderr_c = lf.stderr_slope;
            fit.residual = lf.residual_rms;
            fit.r2 = lf.r2;
            break;
        }
        case DecayModel::stretched: {
            auto rss_at = [&](double eta) {
                std::vector<double> x(d.ns.size());
                for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::pow(d.ns[i], eta);
                const LinFit lf = linear_fit(x, d.logu);
                return lf.residual_rms * lf.residual_rms * static_cast<double>(d.ns.size());
            };
            const double eta = golden_minimize(rss_at, 0.05, 1.0);
            std::vector<double> x(d.ns.size());
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::pow(d.ns[i], eta);
            const LinFit lf = linear_fit(x, d.logu);
            fit.eta = eta;
            fit.c = -lf.slope;
            fit.C = std::exp(lf.intercept);
            fit.stderr_c = lf.stderr_slope;
            fit.residual = lf.residual_rms;
            fit.r2 = lf.r2;
            // profile curvature -> stderr of eta
            const double h = 0.01;
            const double r0 = rss_at(eta);
            const double rp = rss_at(std::min(1.0, eta + h));
            const double rm = rss_at(std::max(0.05, eta - h));
            const double curv = (rp - 2.0 * r0 + rm) / (h * h);
            const double dof = static_cast<double>(d.ns.size() > 3 ? d.ns.size() - 3 : 1);
            const double s2 = r0 / dof;
            fit.stderr_eta = curv > 0.0 ? std::sqrt(2.0 * s2 / curv) : 0.0;
            break;
        }
    }
    return fit;
}

DecayFit fit_decay(const TailHistogram& hist, DecayModel model, long min_survivors,
                   long n_lo) {
    const std::vector<double> u = hist.fractions();
    long hi = 0;
    for (long n = 1; n <= static_cast<long>(hist.horizon()); ++n) {
        const auto s = hist.survivors[static_cast<std::size_t>(n)];
        if (s >= min_survivors && s > hist.censored) hi = n;
    }
    if (hi <= n_lo)
        throw UnderdeterminedError("fit_decay: no window with enough survivors");
    return fit_decay(u, FitWindow{n_lo, hi}, model);
}

PolyDecayCheck polynomial_decay_check(std::span<const double> u, long horizon, double cap) {
    if (horizon < 1) throw ContractError("polynomial_decay_check: horizon must be >= 1");
    if (static_cast<std::size_t>(horizon) >= u.size())
        throw ContractError("polynomial_decay_check: horizon exceeds the sequence length");
    for (long n = 1; n <= horizon; ++n)
        if (!(u[static_cast<std::size_t>(n)] > 0.0))
            throw ContractError("polynomial_decay_check: u must be positive on [1, horizon]");

    // max over n of (max_{k in [ceil(n/2), n]} u_k) / u_n, via a monotone deque
    PolyDecayCheck res;
    std::deque<long> dq;  // indices with decreasing u values
    long next = 1;
    for (long n = 1; n <= horizon; ++n) {
        for (; next <= n; ++next) {
            while (!dq.empty() && u[static_cast<std::size_t>(dq.back())] <=
                                      u[static_cast<std::size_t>(next)])
                dq.pop_back();
            dq.push_back(next);
        }
        const long lo = (n + 1) / 2;  // ceil(n/2)
        while (dq.front() < lo) dq.pop_front();
        const double c = u[static_cast<std::size_t>(dq.front())] /
                         u[static_cast<std::size_t>(n)];
        res.C = std::max(res.C, c);
    }
    res.ok = res.C <= cap;
    return res;
}

}  // namespace nue
