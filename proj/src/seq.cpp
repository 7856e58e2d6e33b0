#include "nue/seq.hpp"

#include <algorithm>
#include <cmath>

#include "nue/numeric.hpp"

namespace nue {

Seq::Seq(std::vector<double> v) : values(std::move(v)) {
    for (double x : values)
        if (!(x >= 0.0)) throw ContractError("Seq entries must be nonnegative");
}

Seq Seq::stretched(double c, double eta, std::size_t horizon, double C) {
    Seq s;
    s.values.resize(horizon);
    for (std::size_t n = 0; n < horizon; ++n)
        s.values[n] = C * std::exp(-c * std::pow(static_cast<double>(n), eta));
    return s;
}

Seq Seq::polynomial(double gamma, std::size_t horizon, double C, double cap) {
    Seq s;
    s.values.resize(horizon);
    if (horizon > 0) s.values[0] = cap;
    for (std::size_t n = 1; n < horizon; ++n)
        s.values[n] = C * std::pow(static_cast<double>(n), -gamma);
    return s;
}

Seq convolve(const Seq& w1, const Seq& w2) {
    Seq out;
    if (w1.values.empty() || w2.values.empty()) return out;
    out.values.assign(w1.values.size() + w2.values.size() - 1, 0.0);
    for (std::size_t n = 0; n < out.values.size(); ++n) {
        NeumaierSum s;
        const std::size_t a_lo = n >= w2.values.size() ? n - w2.values.size() + 1 : 0;
        const std::size_t a_hi = std::min(n, w1.values.size() - 1);
        for (std::size_t a = a_lo; a <= a_hi; ++a) s.add(w1.values[a] * w2.values[n - a]);
        out.values[n] = s.value();
    }
    return out;
}

namespace {

// (w*w)_p <= w_p for all p <= horizon, with w_n = 1_{n>=K} v_n.
bool subadditive_ok(const std::vector<double>& v, long K, long horizon) {
    for (long p = 2 * K; p <= horizon; ++p) {
        NeumaierSum s;
        for (long a = K; a <= p - K; ++a) s.add(v[a] * v[p - a]);
        if (!(s.value() <= v[p])) return false;
    }
    return true;
}

}  // namespace

SubadditiveThreshold subadditive_threshold(double c, double eta, double C, long horizon) {
    if (eta == 1.0)
        throw DomainError("subadditive_threshold: eta = 1 degenerates (gamma(1) = 0)");
    if (!(eta > 0.0 && eta < 1.0))
        throw DomainError("subadditive_threshold: eta must lie in (0,1)");
    if (!(c > 0.0) || !(C > 0.0))
        throw DomainError("subadditive_threshold: c and C must be positive");
    if (horizon < 2) throw ContractError("subadditive_threshold: horizon too small");

    std::vector<double> v(static_cast<std::size_t>(horizon) + 1);
    for (long n = 0; n <= horizon; ++n)
        v[n] = C * std::exp(-c * std::pow(static_cast<double>(n), eta));

    SubadditiveThreshold res;
    res.gamma = gamma_eta(eta);

    // check(K) is monotone in K: binary search the smallest passing K.
    long lo = 1, hi = horizon / 2 + 1;  // hi always passes: (w*w) vanishes below 2K
    while (lo < hi) {
        const long mid = lo + (hi - lo) / 2;
        if (subadditive_ok(v, mid, horizon))
            hi = mid;
        else
            lo = mid + 1;
    }
    res.k_min = lo;

    // The paper's sufficient K: 2C sum_{j>=K} exp(-c gamma j^eta) <= 1.
    // Sum backwards from where terms stop mattering.
    long j_max = horizon;
    while (C * std::exp(-c * res.gamma * std::pow(static_cast<double>(j_max), eta)) > 1e-22 &&
           j_max < 100000000L)
        j_max *= 2;
    NeumaierSum tail;
    long k_paper = j_max + 1;
    for (long j = j_max; j >= 1; --j) {
        tail.add(std::exp(-c * res.gamma * std::pow(static_cast<double>(j), eta)));
        if (2.0 * C * tail.value() <= 1.0) k_paper = j;
    }
    res.k_paper = k_paper;
    return res;
}

double gamma_eta(double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("gamma_eta: eta must lie in (0,1]");
    constexpr long kGrid = 1000000;
    double best = std::numeric_limits<double>::infinity();
    for (long i = 1; i <= kGrid; ++i) {
        const double x = 0.5 * static_cast<double>(i) / static_cast<double>(kGrid);
        const double xe = std::pow(x, eta);
        const double val = (xe + std::pow(1.0 - x, eta) - 1.0) / xe;
        best = std::min(best, val);
    }
    return best;
}

double gamma_eta_endpoint(double eta) { return 2.0 - std::pow(2.0, eta); }

GenSeries gen_series_coeffs(double C5, double lam2, long R, std::size_t n) {
    if (!(lam2 > 0.0 && lam2 < 1.0)) throw DomainError("gen_series: lam2 must lie in (0,1)");
    if (R < 1) throw DomainError("gen_series: R must be >= 1");
    if (C5 < 0.0) throw DomainError("gen_series: C5 must be >= 0");
    const double kappa = C5 * std::pow(lam2, static_cast<double>(R));
    if (!(lam2 + kappa < 1.0))
        throw ContractError("gen_series: lam2 + C5 lam2^R >= 1, pole inside the unit disk");

    GenSeries out;
    out.coeffs.values.assign(n + 1, 0.0);
    for (std::size_t j = static_cast<std::size_t>(R); j <= n; ++j) {
        double w = lam2 * out.coeffs.values[j - 1] +
                   kappa * out.coeffs.values[j - static_cast<std::size_t>(R)];
        if (j == static_cast<std::size_t>(R)) w += kappa;
        out.coeffs.values[j] = w;
    }

    if (C5 == 0.0) {
        out.root = 0.0;
        out.decay_rate = 0.0;
        return out;
    }
    // g(z) = 1 - lam2 z - kappa z^R is strictly decreasing on z > 0 with
    // g(1) > 0 by the hypothesis and g(1/lam2) = -C5 < 0.
    auto g = [&](double z) {
        return 1.0 - lam2 * z - kappa * std::pow(z, static_cast<double>(R));
    };
    out.root = bisect_root(g, 1.0, 1.0 / lam2, 1e-12);
    out.decay_rate = 1.0 / out.root;
    return out;
}

double tail_sum(const Seq& w, std::size_t n) {
    NeumaierSum s;
    for (std::size_t p = w.values.size(); p > n; --p) s.add(w.values[p - 1]);
    return s.value();
}

double stretched_tail_envelope(double c, double eta, double n) {
    return std::pow(n, 1.0 - eta) * std::exp(-c * std::pow(0.5 * n, eta));
}

}  // namespace nue
