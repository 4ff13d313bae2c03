#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace tripwell {

// Fixed-order pairwise summation; the order depends only on the length,
// so results are reproducible bit for bit.
inline double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& x) {
    return pairwise_sum(x.data(), x.size());
}

// Round to `digits` significant digits (used for report output).
inline double round_sig(double v, int digits = 12) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    double e = std::floor(std::log10(std::fabs(v)));
    double scale = std::pow(10.0, digits - 1 - e);
    if (!std::isfinite(scale) || scale == 0.0) return v;
    double r = std::round(v * scale) / scale;
    return std::isfinite(r) ? r : v;
}

// Golden-section search for a minimum of a unimodal f on [a,b].
template <class F>
double golden_min(F&& f, double a, double b, double tol = 1e-12, int max_iter = 500) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > tol * (1.0 + std::fabs(a) + std::fabs(b)); ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - g * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + g * (b - a); fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Bisection on a continuous function with f(lo), f(hi) of opposite sign.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
    double flo = f(lo);
    for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; }
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace tripwell
