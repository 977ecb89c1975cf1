#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace wvcp::stats {

inline double mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
    double m = mean(xs);
    double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz).
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_bt = a * std::log(x) + b * std::log(1.0 - x) -
                   (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::betacf(a, b, x) / a;
    return 1.0 - bt * detail::betacf(b, a, 1.0 - x) / b;
}

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p_value = 1.0;
};

// Welch's unequal-variance two-sample t-test, two-sided p-value.
inline WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("welch_t_test needs at least 2 samples per side");
    double ma = mean(a), mb = mean(b);
    double va = sample_variance(a) / static_cast<double>(a.size());
    double vb = sample_variance(b) / static_cast<double>(b.size());
    WelchResult r;
    if (va + vb == 0.0) {
        // degenerate constant samples: identical means are indistinguishable
        r.t = 0.0;
        r.df = static_cast<double>(a.size() + b.size() - 2);
        r.p_value = ma == mb ? 1.0 : 0.0;
        return r;
    }
    r.t = (ma - mb) / std::sqrt(va + vb);
    double num = (va + vb) * (va + vb);
    double den = va * va / static_cast<double>(a.size() - 1) +
                 vb * vb / static_cast<double>(b.size() - 1);
    r.df = num / den;
    r.p_value = ibeta(r.df / 2.0, 0.5, r.df / (r.df + r.t * r.t));
    return r;
}

}  // namespace wvcp::stats
