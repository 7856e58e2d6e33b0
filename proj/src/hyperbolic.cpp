#include "nue/hyperbolic.hpp"

#include <algorithm>
#include <cmath>

#include "nue/numeric.hpp"

namespace nue {

HyperbolicParams HyperbolicParams::defaults(double lambda, double beta,
                                            std::size_t eps_count) {
    HyperbolicParams p;
    p.lambda = lambda;
    p.sigma = std::exp(-lambda / 8.0);
    p.b = std::min(0.5, 1.0 / (4.0 * beta)) / 2.0;
    p.eps.assign(eps_count, 0.01);
    p.delta = p.delta_of_eps(p.eps.empty() ? 0.01 : p.eps[0]);
    p.validate(beta);
    return p;
}

void HyperbolicParams::validate(double beta) const {
    if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("params: sigma must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("params: delta must lie in (0,1)");
    if (!(lambda > 0.0)) throw ConfigError("params: lambda must be > 0");
    const double bmax = std::min(0.5, 1.0 / (4.0 * beta));
    if (!(b > 0.0 && b < bmax))
        throw ConfigError("params: b must lie in (0, min(1/2, 1/(4 beta)))");
    for (double e : eps)
        if (!(e > 0.0 && e < 1.0)) throw ConfigError("params: eps entries must lie in (0,1)");
}

std::vector<double> HyperbolicParams::delta_levels(std::size_t count) const {
    if (eps.size() < count) throw ConfigError("params: not enough eps entries");
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(delta_of_eps(eps[i]));
    return out;
}

bool HyperbolicTimeSet::is_time(long n) const noexcept {
    return std::binary_search(times.begin(), times.end(), n);
}

HyperbolicTimeSet hyperbolic_times(const OrbitTrace& trace, const HyperbolicParams& params) {
    if (!trace.has_level(params.delta))
        throw ConfigError("hyperbolic_times: trace misses the params.delta level");
    const std::vector<double>& r = trace.r_for(params.delta);
    const std::vector<double>& a = trace.a;
    const long n_max = static_cast<long>(trace.length);
    const double L = -std::log(params.sigma);

    HyperbolicTimeSet set;
    set.horizon = trace.length;
    for (long n = 1; n <= n_max; ++n) {
        bool ok = true;
        double wa = 0.0;
        for (long k = 1; k <= n; ++k) {
            wa += a[n - k];
            if (!(wa >= static_cast<double>(k) * L)) {
                ok = false;
                break;
            }
            if (!(r[n - k] <= params.b * (static_cast<double>(k) * L))) {
                ok = false;
                break;
            }
        }
        if (ok) set.times.push_back(n);
    }

    set.super_flags.assign(set.times.size(), false);
    if (params.eps.size() >= 2) {
        const double d1 = params.delta_of_eps(params.eps[0]);
        const double d2 = params.delta_of_eps(params.eps[1]);
        if (trace.has_level(d1) && trace.has_level(d2)) {
            const std::vector<long> sh = super_hyperbolic_times(trace, params);
            for (std::size_t i = 0; i < set.times.size(); ++i)
                set.super_flags[i] = std::binary_search(sh.begin(), sh.end(), set.times[i]);
        }
    }
    return set;
}

PlissResult pliss_times(std::span<const double> a, double c1, double c2, double A) {
    for (double v : a)
        if (v > A) throw ContractError("pliss_times: an entry exceeds the cap A");
    if (!(c1 < c2)) throw ContractError("pliss_times: c1 < c2 required");
    if (!(A > c1)) throw ContractError("pliss_times: A > c1 required");

    PlissResult res;
    res.density_bound = (c2 - c1) / (A - c1);
    const long n = static_cast<long>(a.size());
    for (long p = 1; p <= n; ++p) {
        bool ok = true;
        double w = 0.0;
        for (long k = 1; k <= p; ++k) {
            w += a[p - k];
            if (!(w >= c1 * static_cast<double>(k))) {
                ok = false;
                break;
            }
        }
        if (ok) res.times.push_back(p);
    }
    return res;
}

std::vector<long> super_hyperbolic_times(const OrbitTrace& trace,
                                         const HyperbolicParams& params) {
    if (params.eps.size() < 2)
        throw ConfigError("super_hyperbolic_times: needs eps1 and eps2");
    const double d1 = params.delta_of_eps(params.eps[0]);
    const double d2 = params.delta_of_eps(params.eps[1]);
    if (!trace.has_level(d1) || !trace.has_level(d2))
        throw ConfigError("super_hyperbolic_times: trace misses a delta(eps) level");
    const std::vector<double>& r1 = trace.r_for(d1);
    const std::vector<double>& r2 = trace.r_for(d2);
    const std::vector<double>& a = trace.a;
    const double quarter_lambda = params.lambda * 0.25;
    const double c1 = 2.0 * std::sqrt(params.eps[0]);
    const double c2 = 2.0 * std::sqrt(params.eps[1]);

    std::vector<long> out;
    const long n_max = static_cast<long>(trace.length);
    for (long p = 1; p <= n_max; ++p) {
        bool ok = true;
        double wa = 0.0, w1 = 0.0, w2 = 0.0;
        for (long k = 1; k <= p; ++k) {
            wa += a[p - k];
            w1 += r1[p - k];
            w2 += r2[p - k];
            const double kd = static_cast<double>(k);
            if (!(wa >= quarter_lambda * kd) || !(w1 <= c1 * kd) || !(w2 <= c2 * kd)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(p);
    }
    return out;
}

PrefixConditionTracker::PrefixConditionTracker(double lambda, std::span<const double> eps)
    : lambda_(lambda), eps_(eps.begin(), eps.end()), sr_(eps.size()) {}

bool PrefixConditionTracker::step(double a_k, std::span<const double> r_k) {
    sa_.add(a_k);
    for (std::size_t i = 0; i < eps_.size(); ++i) sr_[i].add(r_k[i]);
    ++n_;
    const double nd = static_cast<double>(n_);
    bool ok = sa_.value() >= 0.5 * lambda_ * nd;
    for (std::size_t i = 0; ok && i < eps_.size(); ++i)
        ok = sr_[i].value() <= 2.0 * eps_[i] * nd;
    return ok;
}

namespace {

// good(n) for the h1/h2 prefix conditions over `count` eps entries.
std::vector<bool> prefix_good(const OrbitTrace& trace, const HyperbolicParams& params,
                              std::size_t count) {
    std::vector<const std::vector<double>*> rs;
    rs.reserve(count);
    for (double d : params.delta_levels(count)) rs.push_back(&trace.r_for(d));

    std::vector<bool> good(trace.length + 1, false);
    PrefixConditionTracker tracker(params.lambda,
                                   std::span<const double>(params.eps.data(), count));
    std::vector<double> rk(count);
    for (std::size_t n = 1; n <= trace.length; ++n) {
        for (std::size_t i = 0; i < count; ++i) rk[i] = (*rs[i])[n - 1];
        good[n] = tracker.step(trace.a[n - 1], rk);
    }
    return good;
}

}  // namespace

HittingTime h1_censored(const OrbitTrace& trace, const HyperbolicParams& params) {
    if (params.eps.size() < 2) throw ConfigError("h1: needs (eps1, eps2)");
    HittingTime res;
    res.horizon = static_cast<long>(trace.length);
    if (trace.length == 0) return res;
    const std::vector<bool> good = prefix_good(trace, params, 2);
    long last_bad = 0;
    for (long n = res.horizon; n >= 1; --n)
        if (!good[n]) {
            last_bad = n;
            break;
        }
    if (last_bad == res.horizon) return res;  // censored: fails at the horizon itself
    res.value = last_bad + 1;
    res.censored = false;
    return res;
}

HittingTime h2(const OrbitTrace& trace, const HyperbolicParams& params) {
    if (params.eps.size() < 3) throw ConfigError("h2: needs (eps1, eps2, eps3)");
    HittingTime res;
    res.horizon = static_cast<long>(trace.length);
    const std::vector<bool> good = prefix_good(trace, params, 3);
    for (long n = 1; n <= res.horizon; ++n)
        if (good[n]) {
            res.value = n;
            res.censored = false;
            break;
        }
    return res;
}

long separation_time(double sigma) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw ContractError("separation_time: sigma in (0,1)");
    const double rhs = std::pow(sigma, -0.5);
    for (long p = 1; p <= 100000000L; ++p) {
        if (1.0 + 2.0 * std::pow(sigma, 0.5 * static_cast<double>(p - 1)) <= rhs) return p;
    }
    throw ContractError("separation_time: no P found (sigma too close to 1)");
}

double theta_bound(double eps1, double eps2, double theta1) {
    return theta1 + (1.0 - std::sqrt(eps1)) + (1.0 - std::sqrt(eps2)) - 2.0;
}

}  // namespace nue
