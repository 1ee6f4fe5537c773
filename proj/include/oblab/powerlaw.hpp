#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "oblab/rng.hpp"
#include "oblab/stat_series.hpp"

namespace oblab {

struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;   // of log y vs log x
    int n_points = 0;
};

namespace detail {

inline SlopeFit ls_slope(const std::vector<double>& lx, const std::vector<double>& ly) {
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double var = sxx / n - (sx / n) * (sx / n);
    if (var <= 0.0) throw std::invalid_argument("ls_slope: degenerate x values");
    SlopeFit f;
    f.slope = (sxy / n - sx * sy / (n * n)) / var;
    f.intercept = sy / n - f.slope * sx / n;
    f.n_points = static_cast<int>(lx.size());
    return f;
}

}  // namespace detail

/// Least-squares slope of log y vs log x over x in [xmin, xmax], with a
/// bootstrap standard error. Points with y <= 0 are skipped.
inline SlopeFit powerlaw_slope(const StatSeries& s, double xmin, double xmax,
                               int bootstrap = 200, std::uint64_t seed = 0x9e3779b9u) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.x[i] >= xmin && s.x[i] <= xmax && s.y[i] > 0.0) {
            lx.push_back(std::log(s.x[i]));
            ly.push_back(std::log(s.y[i]));
        }
    if (lx.size() < 5) throw std::invalid_argument("powerlaw_slope: fewer than 5 positive points in range");
    SlopeFit fit = detail::ls_slope(lx, ly);
    if (bootstrap > 0) {
        RngStream rng(seed);
        std::vector<double> slopes;
        slopes.reserve(static_cast<std::size_t>(bootstrap));
        std::vector<double> bx(lx.size()), by(ly.size());
        for (int b = 0; b < bootstrap; ++b) {
            for (;;) {
                for (std::size_t i = 0; i < lx.size(); ++i) {
                    const auto j = rng.uniform_index(lx.size());
                    bx[i] = lx[j];
                    by[i] = ly[j];
                }
                try {
                    slopes.push_back(detail::ls_slope(bx, by).slope);
                    break;
                } catch (const std::invalid_argument&) {  // all-equal resample; redraw
                }
            }
        }
        double m = 0;
        for (double v : slopes) m += v;
        m /= static_cast<double>(slopes.size());
        double var = 0;
        for (double v : slopes) var += (v - m) * (v - m);
        fit.std_error = std::sqrt(var / static_cast<double>(slopes.size()));
    }
    return fit;
}

struct HillFit {
    double alpha = 0.0;   // tail index of the complementary CDF, P(X > x) ~ x^-alpha
    double xmin = 0.0;
    std::size_t n_tail = 0;
};

/// Continuous Hill estimator on the samples above the given quantile.
/// For a density ~ x^-(1+alpha) this recovers alpha.
inline HillFit hill_alpha(std::vector<double> samples, double cutoff_quantile = 0.95) {
    if (samples.size() < 50) throw std::invalid_argument("hill_alpha: too few samples");
    if (cutoff_quantile <= 0.0 || cutoff_quantile >= 1.0)
        throw std::invalid_argument("hill_alpha: quantile must be in (0,1)");
    std::sort(samples.begin(), samples.end());
    const auto cut = static_cast<std::size_t>(cutoff_quantile * static_cast<double>(samples.size() - 1));
    HillFit f;
    f.xmin = samples[cut];
    if (f.xmin <= 0.0) throw std::invalid_argument("hill_alpha: non-positive cutoff");
    double acc = 0.0;
    std::size_t k = 0;
    for (std::size_t i = cut + 1; i < samples.size(); ++i) {
        acc += std::log(samples[i] / f.xmin);
        ++k;
    }
    if (k < 10 || acc <= 0.0) throw std::invalid_argument("hill_alpha: degenerate tail");
    f.alpha = static_cast<double>(k) / acc;
    f.n_tail = k;
    return f;
}

namespace detail {

// log of Z(a, c) = integral_{xmin}^inf x^-a exp(-x/c) dx, by Simpson quadrature
// after substituting x = xmin * e^u.
inline double log_trunc_norm(double a, double c, double xmin) {
    const double r = xmin / c;
    // integrand in u: exp((1-a)u - r e^u), prefactor xmin^(1-a)
    const double umax = std::log(std::max(60.0 / r, 1.0 + 1e-9));
    const int n = 4000;  // even
    const double h = umax / n;
    auto g = [&](double u) { return std::exp((1.0 - a) * u - r * std::exp(u)); };
    double acc = g(0.0) + g(umax);
    for (int i = 1; i < n; ++i) acc += g(h * i) * ((i % 2) ? 4.0 : 2.0);
    const double integral = acc * h / 3.0;
    if (!(integral > 0.0)) return -std::numeric_limits<double>::infinity();
    return (1.0 - a) * std::log(xmin) + std::log(integral);
}

template <class Fn>
inline double golden_max(Fn&& f, double lo, double hi, int iters = 48) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

struct TailTruncationTest {
    double alpha_pure = 0.0;    // density exponent a of the pure power law fit
    double alpha_trunc = 0.0;   // density exponent of the truncated fit
    double cutoff = 0.0;        // fitted exponential cutoff scale c
    double xmin = 0.0;
    double lr = 0.0;            // 2 (lnL_trunc - lnL_pure), >= 0 up to numerics
    bool rejects_pure_power = false;
    std::size_t n_tail = 0;
};

/// Likelihood-ratio comparison of a pure power law x^-a against a power law
/// with exponential cutoff x^-a exp(-x/c), fitted by maximum likelihood on
/// the samples above the given quantile. The pure law is rejected when the
/// ratio exceeds `lr_threshold` (default: chi-square_1 at 0.99).
inline TailTruncationTest powerlaw_truncation_test(std::vector<double> samples,
                                                   double cutoff_quantile = 0.90,
                                                   double lr_threshold = 6.63) {
    if (samples.size() < 100) throw std::invalid_argument("powerlaw_truncation_test: too few samples");
    std::sort(samples.begin(), samples.end());
    const auto cut = static_cast<std::size_t>(cutoff_quantile * static_cast<double>(samples.size() - 1));
    TailTruncationTest res;
    res.xmin = samples[cut];
    if (res.xmin <= 0.0) throw std::invalid_argument("powerlaw_truncation_test: non-positive cutoff");
    std::vector<double> tail(samples.begin() + static_cast<std::ptrdiff_t>(cut), samples.end());
    const double n = static_cast<double>(tail.size());
    res.n_tail = tail.size();
    double sum_log_rel = 0.0, sum_log = 0.0, sum_x = 0.0, xmax = 0.0;
    for (double x : tail) {
        sum_log_rel += std::log(x / res.xmin);
        sum_log += std::log(x);
        sum_x += x;
        xmax = std::max(xmax, x);
    }
    if (sum_log_rel <= 0.0) throw std::invalid_argument("powerlaw_truncation_test: degenerate tail");

    res.alpha_pure = 1.0 + n / sum_log_rel;
    const double lnL0 = n * std::log(res.alpha_pure - 1.0) - n * std::log(res.xmin) -
                        res.alpha_pure * sum_log_rel;

    auto lnL1 = [&](double a, double c) {
        return -a * sum_log - sum_x / c - n * detail::log_trunc_norm(a, c, res.xmin);
    };
    // coordinate ascent in (a, log c)
    double a = res.alpha_pure, lc = std::log(xmax * 10.0);
    const double lc_lo = std::log(res.xmin * 1e-3), lc_hi = std::log(xmax * 1e3);
    for (int sweep = 0; sweep < 6; ++sweep) {
        a = detail::golden_max([&](double aa) { return lnL1(aa, std::exp(lc)); }, -2.0, 30.0);
        lc = detail::golden_max([&](double l) { return lnL1(a, std::exp(l)); }, lc_lo, lc_hi);
    }
    res.alpha_trunc = a;
    res.cutoff = std::exp(lc);
    res.lr = 2.0 * (lnL1(a, res.cutoff) - lnL0);
    res.rejects_pure_power = res.lr > lr_threshold;
    return res;
}

struct DecayFits {
    double rss_power = 0.0;
    double rss_exponential = 0.0;
    double rss_stretched = 0.0;
    double beta_stretched = 0.0;  // stretching exponent at the optimum
};

/// Residual sums of squares (in log-ordinate space) of power-law,
/// exponential, and stretched-exponential fits to a positive decaying series.
inline DecayFits compare_decay_fits(const StatSeries& s) {
    std::vector<double> t, ly;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.y[i] > 0.0) {
            t.push_back(s.x[i]);
            ly.push_back(std::log(s.y[i]));
        }
    if (t.size() < 6) throw std::invalid_argument("compare_decay_fits: fewer than 6 positive points");
    auto rss_vs = [&](const std::vector<double>& f) {
        const SlopeFit fit = detail::ls_slope(f, ly);
        double rss = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double r = ly[i] - (fit.intercept + fit.slope * f[i]);
            rss += r * r;
        }
        return rss;
    };
    DecayFits out;
    std::vector<double> feat(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) feat[i] = std::log(t[i]);
    out.rss_power = rss_vs(feat);
    for (std::size_t i = 0; i < t.size(); ++i) feat[i] = t[i];
    out.rss_exponential = rss_vs(feat);
    out.rss_stretched = std::numeric_limits<double>::infinity();
    for (double beta = 0.05; beta <= 1.0 + 1e-9; beta += 0.01) {
        for (std::size_t i = 0; i < t.size(); ++i) feat[i] = std::pow(t[i], beta);
        const double r = rss_vs(feat);
        if (r < out.rss_stretched) {
            out.rss_stretched = r;
            out.beta_stretched = beta;
        }
    }
    return out;
}

}  // namespace oblab
