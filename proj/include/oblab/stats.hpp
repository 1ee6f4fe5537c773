#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "oblab/histogram.hpp"
#include "oblab/price_path.hpp"
#include "oblab/stat_series.hpp"

namespace oblab {

/// Rescaling factor for one-trade returns across system sizes: sqrt(N) / L^(1/4).
inline double bps_scaling_factor(std::int64_t L, std::int64_t N) {
    if (L < 1 || N < 1) throw std::invalid_argument("bps_scaling_factor: L, N must be >= 1");
    return std::sqrt(static_cast<double>(N)) / std::pow(static_cast<double>(L), 0.25);
}

/// Ascending unique integers, roughly `per_decade` of them per factor of 10.
inline std::vector<std::int64_t> log_spaced_lags(std::int64_t lo, std::int64_t hi, int per_decade = 8) {
    if (lo < 1 || hi < lo) throw std::invalid_argument("log_spaced_lags: bad range");
    if (per_decade < 1) throw std::invalid_argument("log_spaced_lags: per_decade < 1");
    std::vector<std::int64_t> out;
    const double ratio = std::pow(10.0, 1.0 / per_decade);
    double v = static_cast<double>(lo);
    while (v <= static_cast<double>(hi) * (1.0 + 1e-12)) {
        const auto iv = static_cast<std::int64_t>(std::llround(v));
        if (out.empty() || iv > out.back()) out.push_back(iv);
        v = std::max(v * ratio, v + 1.0);
    }
    if (out.back() > hi) out.pop_back();
    return out;
}

/// Default lag grid for autocorrelations: every lag up to 32, log-spaced beyond.
inline std::vector<std::int64_t> autocorr_default_lags(std::int64_t max_lag) {
    std::vector<std::int64_t> lags;
    for (std::int64_t l = 1; l <= std::min<std::int64_t>(32, max_lag); ++l) lags.push_back(l);
    if (max_lag > 32)
        for (std::int64_t l : log_spaced_lags(33, max_lag, 12)) lags.push_back(l);
    return lags;
}

enum class ReturnMode { PerStep, PerTrade };

namespace detail {

// Post-burn-in per-step returns as a dense double array.
inline std::vector<double> abs_step_returns(const PricePath& p) {
    if (!p.dense()) throw std::logic_error("estimator requires a dense price path");
    if (p.steps <= p.burn_in) throw std::invalid_argument("empty stationary window");
    std::vector<double> r;
    r.reserve(static_cast<std::size_t>(p.steps - p.burn_in));
    std::int64_t prev = p.price_at(p.burn_in);
    for (std::int64_t t = p.burn_in + 1; t <= p.steps; ++t) {
        const std::int64_t cur = p.x[static_cast<std::size_t>(t - 1)];
        r.push_back(static_cast<double>(std::llabs(cur - prev)));
        prev = cur;
    }
    return r;
}

// Trades at or after the burn-in step.
inline std::vector<Trade> stationary_trades(const PricePath& p) {
    std::vector<Trade> out;
    for (const Trade& tr : p.trades)
        if (tr.t >= p.burn_in) out.push_back(tr);
    return out;
}

}  // namespace detail

/// Lagged absolute-return distributions P_dt(|r|), one histogram per lag.
/// PerTrade mode ignores the lag list and bins consecutive-trade returns.
inline std::vector<Histogram> return_distribution(const PricePath& p,
                                                  const std::vector<std::int64_t>& dts,
                                                  ReturnMode mode, double bin_ratio = 1.25,
                                                  std::int64_t lo = 1) {
    std::vector<Histogram> out;
    if (mode == ReturnMode::PerTrade) {
        const auto trades = detail::stationary_trades(p);
        if (trades.size() < 2) throw std::invalid_argument("return_distribution: fewer than 2 trades");
        std::vector<std::int64_t> s;
        s.reserve(trades.size() - 1);
        for (std::size_t i = 1; i < trades.size(); ++i)
            s.push_back(std::llabs(trades[i].price - trades[i - 1].price));
        out.push_back(log_histogram(s, bin_ratio, lo));
        return out;
    }
    if (!p.dense()) throw std::logic_error("return_distribution(PerStep): dense path required");
    for (std::int64_t dt : dts) {
        if (dt < 1 || p.burn_in + dt > p.steps)
            throw std::invalid_argument("return_distribution: window shorter than lag");
        std::vector<std::int64_t> s;
        s.reserve(static_cast<std::size_t>(p.steps - p.burn_in - dt + 1));
        for (std::int64_t t = p.burn_in + dt; t <= p.steps; ++t)
            s.push_back(std::llabs(p.x[static_cast<std::size_t>(t - 1)] -
                                   p.price_at(t - dt)));
        out.push_back(log_histogram(s, bin_ratio, lo));
    }
    return out;
}

/// Connected autocorrelation of (absolute) one-step returns,
/// <f(r_t) f(r_{t-dt})> - <f(r)>^2 with f = |.| or identity.
inline StatSeries return_autocorrelation(const PricePath& p, const std::vector<std::int64_t>& lags,
                                         bool absolute = true) {
    std::vector<double> a = detail::abs_step_returns(p);
    if (!absolute) {
        std::int64_t prev = p.price_at(p.burn_in);
        std::size_t i = 0;
        for (std::int64_t t = p.burn_in + 1; t <= p.steps; ++t, ++i) {
            const std::int64_t cur = p.x[static_cast<std::size_t>(t - 1)];
            a[i] = static_cast<double>(cur - prev);
            prev = cur;
        }
    }
    const std::size_t n = a.size();
    const std::int64_t max_lag = *std::max_element(lags.begin(), lags.end());
    if (static_cast<std::int64_t>(n) < 10 * max_lag)
        throw std::invalid_argument("return_autocorrelation: window shorter than 10 x max lag");
    double mean = 0.0;
    for (double v : a) mean += v;
    mean /= static_cast<double>(n);

    StatSeries out;
    out.name = absolute ? "abs_return_autocorrelation" : "return_autocorrelation";
    for (std::int64_t lag : lags) {
        const auto L = static_cast<std::size_t>(lag);
        double acc = 0.0;
        for (std::size_t i = L; i < n; ++i) acc += a[i] * a[i - L];
        const double c = acc / static_cast<double>(n - L) - mean * mean;
        out.push(static_cast<double>(lag), c, static_cast<std::int64_t>(n - L));
    }
    out.meta["mean_abs_return"] = mean;
    return out;
}

namespace detail {

struct WindowRange {
    std::int64_t lo, hi;  // min / max price seen in the window
};

// Per-window price ranges over non-overlapping windows [start + k*dt, start + (k+1)*dt],
// endpoints included. Works on dense and sparse paths alike.
template <class Fn>
inline void for_each_window_range(const PricePath& p, std::int64_t dt, Fn&& fn) {
    const std::int64_t start = p.burn_in;
    const std::int64_t n_win = (p.steps - start) / dt;
    if (p.dense()) {
        for (std::int64_t w = 0; w < n_win; ++w) {
            const std::int64_t t0 = start + w * dt;
            std::int64_t lo = p.price_at(t0), hi = lo;
            for (std::int64_t t = t0 + 1; t <= t0 + dt; ++t) {
                const std::int64_t v = p.x[static_cast<std::size_t>(t - 1)];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            fn(WindowRange{lo, hi}, t0);
        }
        return;
    }
    // Sparse: prevailing price at the window start plus trades inside (t0, t0+dt].
    std::size_t i = 0;
    std::int64_t prevailing = p.x0;
    for (std::int64_t w = 0; w < n_win; ++w) {
        const std::int64_t t0 = start + w * dt;
        while (i < p.trades.size() && p.trades[i].t <= t0) prevailing = p.trades[i++].price;
        std::int64_t lo = prevailing, hi = prevailing;
        std::size_t j = i;
        while (j < p.trades.size() && p.trades[j].t <= t0 + dt) {
            lo = std::min(lo, p.trades[j].price);
            hi = std::max(hi, p.trades[j].price);
            ++j;
        }
        fn(WindowRange{lo, hi}, t0);
    }
}

}  // namespace detail

/// Mean price range max|x(t') - x(t'')| over windows of length dt.
inline StatSeries hurst_simplified(const PricePath& p, const std::vector<std::int64_t>& dts) {
    StatSeries out;
    out.name = "hurst_simplified";
    for (std::int64_t dt : dts) {
        if (dt < 1) throw std::invalid_argument("hurst_simplified: dt < 1");
        double acc = 0.0;
        std::int64_t n = 0;
        detail::for_each_window_range(p, dt, [&](detail::WindowRange r, std::int64_t) {
            acc += static_cast<double>(r.hi - r.lo);
            ++n;
        });
        if (n == 0) throw std::invalid_argument("hurst_simplified: window longer than path");
        out.push(static_cast<double>(dt) * p.step_time, acc / static_cast<double>(n), n);
    }
    return out;
}

struct HurstNormalizedResult {
    StatSeries series;
    std::vector<double> excluded_fraction;  // per dt: share of zero-variance windows
};

/// Price range divided by the in-window standard deviation of one-step
/// returns, averaged over windows. Zero-variance windows are excluded from
/// the average; the exclusion fraction is reported per lag.
inline HurstNormalizedResult hurst_normalized(const PricePath& p,
                                              const std::vector<std::int64_t>& dts) {
    if (!p.dense()) throw std::logic_error("hurst_normalized: dense path required");
    HurstNormalizedResult res;
    res.series.name = "hurst_normalized";
    for (std::int64_t dt : dts) {
        if (dt < 2) throw std::invalid_argument("hurst_normalized: dt must be >= 2");
        double acc = 0.0;
        std::int64_t valid = 0, total = 0;
        detail::for_each_window_range(p, dt, [&](detail::WindowRange r, std::int64_t t0) {
            ++total;
            double s1 = 0.0, s2 = 0.0;
            std::int64_t prev = p.price_at(t0);
            for (std::int64_t t = t0 + 1; t <= t0 + dt; ++t) {
                const std::int64_t cur = p.x[static_cast<std::size_t>(t - 1)];
                const double d = static_cast<double>(cur - prev);
                s1 += d;
                s2 += d * d;
                prev = cur;
            }
            const double m = s1 / static_cast<double>(dt);
            const double var = s2 / static_cast<double>(dt) - m * m;
            if (var <= 0.0) return;
            acc += static_cast<double>(r.hi - r.lo) / std::sqrt(var);
            ++valid;
        });
        if (total == 0) throw std::invalid_argument("hurst_normalized: window longer than path");
        if (valid == 0)
            throw std::runtime_error("hurst_normalized: all windows excluded (zero return variance)");
        res.series.push(static_cast<double>(dt) * p.step_time, acc / static_cast<double>(valid), valid);
        res.excluded_fraction.push_back(1.0 - static_cast<double>(valid) / static_cast<double>(total));
    }
    res.series.meta["excluded_fraction"] = res.excluded_fraction;
    return res;
}

struct IntereventStats {
    StatSeries waiting_cdf;         // P(wait <= x)
    StatSeries conditional_return;  // mean |price jump| vs preceding waiting time
    std::vector<double> waits;      // raw inter-trade times (physical units)
    std::vector<double> jumps;      // |price change| across each wait
    double mean_wait = 0.0;
};

/// Inter-trade waiting times and the mean return conditioned on them. Each
/// trade-to-trade price change is paired with the waiting interval it spans.
inline IntereventStats interevent_statistics(const PricePath& p, double bin_ratio = 1.25,
                                             std::size_t max_cdf_points = 2000) {
    const auto trades = detail::stationary_trades(p);
    if (trades.size() < 100) throw std::invalid_argument("interevent_statistics: fewer than 100 trades");
    IntereventStats st;
    st.waits.reserve(trades.size() - 1);
    st.jumps.reserve(trades.size() - 1);
    for (std::size_t i = 1; i < trades.size(); ++i) {
        st.waits.push_back(static_cast<double>(trades[i].t - trades[i - 1].t) * p.step_time);
        st.jumps.push_back(static_cast<double>(std::llabs(trades[i].price - trades[i - 1].price)));
    }
    const std::size_t n = st.waits.size();
    for (double w : st.waits) st.mean_wait += w;
    st.mean_wait /= static_cast<double>(n);

    // Empirical CDF on the unique waiting times, thinned for output.
    std::vector<double> sorted = st.waits;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, std::int64_t>> cum;  // (value, #waits <= value)
    for (std::size_t i = 0; i < n; ++i)
        if (i + 1 == n || sorted[i + 1] != sorted[i]) cum.emplace_back(sorted[i], static_cast<std::int64_t>(i + 1));
    const std::size_t stride = cum.size() > max_cdf_points ? (cum.size() + max_cdf_points - 1) / max_cdf_points : 1;
    st.waiting_cdf.name = "waiting_cdf";
    for (std::size_t i = 0; i < cum.size(); i += stride) {
        const auto& [v, c] = cum[i];
        st.waiting_cdf.push(v, static_cast<double>(c) / static_cast<double>(n), c);
    }
    if ((cum.size() - 1) % stride != 0) {  // always keep the last point
        const auto& [v, c] = cum.back();
        st.waiting_cdf.push(v, 1.0, c);
    }
    st.waiting_cdf.meta["mean_wait"] = st.mean_wait;
    st.waiting_cdf.meta["n_waits"] = n;

    // Mean |jump| conditioned on the waiting time, log-binned waits.
    const double wmax = sorted.back();
    std::vector<double> edges{1.0 * p.step_time};
    while (edges.back() <= wmax) edges.push_back(edges.back() * bin_ratio);
    std::vector<double> sum(edges.size() - 1, 0.0);
    std::vector<std::int64_t> cnt(edges.size() - 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), st.waits[i]);
        if (it == edges.begin() || it == edges.end()) continue;
        const auto k = static_cast<std::size_t>(it - edges.begin()) - 1;
        sum[k] += st.jumps[i];
        ++cnt[k];
    }
    st.conditional_return.name = "conditional_return";
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
        if (cnt[k] > 0)
            st.conditional_return.push(std::sqrt(edges[k] * edges[k + 1]),
                                       sum[k] / static_cast<double>(cnt[k]), cnt[k]);
    return st;
}

/// Arithmetic mean of v over [from, to).
inline double mean_volatility(const std::vector<double>& v, std::size_t from, std::size_t to) {
    if (from >= to || to > v.size()) throw std::invalid_argument("mean_volatility: empty window");
    double acc = 0.0;
    for (std::size_t i = from; i < to; ++i) acc += v[i];
    return acc / static_cast<double>(to - from);
}

/// One-sample Kolmogorov-Smirnov p-value against Exp(mean of the data).
/// The rate is fitted, so the p-value is conservative; good enough for a
/// consistency check.
inline double ks_exponential_pvalue(std::vector<double> waits) {
    if (waits.size() < 10) throw std::invalid_argument("ks_exponential_pvalue: too few samples");
    std::sort(waits.begin(), waits.end());
    const double n = static_cast<double>(waits.size());
    double mean = 0.0;
    for (double w : waits) mean += w;
    mean /= n;
    double d = 0.0;
    for (std::size_t i = 0; i < waits.size(); ++i) {
        const double f = 1.0 - std::exp(-waits[i] / mean);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k)
        p += 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace oblab
