#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nue {

// Neumaier-compensated accumulator. Stretched-exponential magnitudes span
// hundreds of orders over our horizons; plain summation loses the tails.
class NeumaierSum {
  public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }
    void reset() noexcept { sum_ = comp_ = 0.0; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> v) noexcept {
    NeumaierSum s;
    for (double x : v) s.add(x);
    return s.value();
}

// Ordinary least squares y = a + b x with standard errors.
struct LinFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
    double residual_rms = 0.0;
    double stderr_intercept = 0.0;
    double stderr_slope = 0.0;
    std::size_t n = 0;
};

inline LinFit linear_fit(std::span<const double> x, std::span<const double> y) {
    LinFit f;
    f.n = x.size();
    if (f.n < 2) return f;
    NeumaierSum sx, sy;
    for (std::size_t i = 0; i < f.n; ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / static_cast<double>(f.n);
    const double my = sy.value() / static_cast<double>(f.n);
    NeumaierSum sxx, sxy;
    for (std::size_t i = 0; i < f.n; ++i) {
        sxx.add((x[i] - mx) * (x[i] - mx));
        sxy.add((x[i] - mx) * (y[i] - my));
    }
    const double vxx = sxx.value();
    f.slope = vxx > 0.0 ? sxy.value() / vxx : 0.0;
    f.intercept = my - f.slope * mx;
    NeumaierSum sse, sst;
    for (std::size_t i = 0; i < f.n; ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        sse.add(e * e);
        sst.add((y[i] - my) * (y[i] - my));
    }
    const double rss = sse.value();
    const double tss = sst.value();
    f.r2 = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    f.residual_rms = std::sqrt(rss / static_cast<double>(f.n));
    if (f.n > 2 && vxx > 0.0) {
        const double s2 = rss / static_cast<double>(f.n - 2);
        f.stderr_slope = std::sqrt(s2 / vxx);
        f.stderr_intercept = std::sqrt(s2 * (1.0 / static_cast<double>(f.n) + mx * mx / vxx));
    }
    return f;
}

// Golden-section minimization of a unimodal function on [lo, hi].
inline double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                              int iters = 90) {
    constexpr double phi = 0.6180339887498948482;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Bisection for a sign change of f on [lo, hi]; f(lo) and f(hi) must differ
// in sign. Returns the midpoint of the final bracket of width <= tol.
inline double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                          double tol) {
    double flo = f(lo);
    for (int i = 0; i < 200 && (hi - lo) > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace nue
