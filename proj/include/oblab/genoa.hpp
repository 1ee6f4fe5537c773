#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "oblab/book.hpp"
#include "oblab/powerlaw.hpp"
#include "oblab/price_path.hpp"
#include "oblab/rng.hpp"
#include "oblab/stats.hpp"
#include "oblab/stigler.hpp"

namespace oblab {

/// Reduced Genoa market: free-Stigler order flow whose deposition window
/// (d_t, s_t) expands with an exponentially weighted volatility average.
struct GenoaConfig {
    std::int64_t N = 1000;   // order lifetime / maximum order count
    double b = 7.0;          // width-to-shift ratio, must exceed 2
    double g = 51.0;         // feedback factor
    double lambda = 1e-3;    // EMA weight
    double v_cap = 1e8;      // volatility ceiling; hitting it marks divergence
    double v0 = 1.0;         // initial volatility
    std::int64_t steps = 0;
    std::int64_t burn_in = 0;
};

/// EMA recursion v' = (1-lambda) v + lambda |r|, clamped at v_cap.
inline double genoa_update_volatility(double v, std::int64_t r, double lambda, double v_cap) {
    if (v < 0.0) throw std::invalid_argument("genoa_update_volatility: v < 0");
    return std::min((1.0 - lambda) * v + lambda * static_cast<double>(std::llabs(r)), v_cap);
}

/// Window width and shift from the current volatility:
/// d = max(1, ceil(g v)), s = floor(d / b).
inline std::pair<std::int64_t, std::int64_t> genoa_window(double v, double g, double b) {
    if (v < 0.0) throw std::invalid_argument("genoa_window: v < 0");
    const auto d = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(g * v)));
    const auto s = static_cast<std::int64_t>(std::floor(static_cast<double>(d) / b));
    return {d, s};
}

class GenoaModel {
public:
    GenoaModel(GenoaConfig cfg, std::uint64_t seed)
        : cfg_(cfg), rng_(seed), book_(/*track_ages=*/true), v_(cfg.v0) {
        if (cfg_.N < 1) throw std::invalid_argument("GenoaConfig: N must be >= 1");
        if (cfg_.v_cap <= 0.0) throw std::invalid_argument("GenoaConfig: v_cap must be positive");
        if (cfg_.v0 < 0.0) throw std::invalid_argument("GenoaConfig: v0 must be >= 0");
    }

    std::optional<std::int64_t> step() {
        ++now_;
        book_.expire(now_, cfg_.N);
        const auto [d, s] = genoa_window(v_, cfg_.g, cfg_.b);
        const Side side = rng_.uniform_index(2) == 0 ? Side::Bid : Side::Ask;
        const auto [lo, hi] = side == Side::Bid ? stigler_bid_window(price_, s, d)
                                                : stigler_ask_window(price_, s, d);
        const std::int64_t tick = rng_.uniform_int(lo, hi);

        const std::int64_t x_prev = price_;
        std::optional<std::int64_t> trade;
        if (side == Side::Bid) {
            if (const auto ask = book_.best(Side::Ask); ask && tick >= *ask) {
                book_.remove_best(Side::Ask);
                price_ = *ask;
                trade = price_;
            }
        } else {
            if (const auto bid = book_.best(Side::Bid); bid && tick <= *bid) {
                book_.remove_best(Side::Bid);
                price_ = *bid;
                trade = price_;
            }
        }
        if (!trade) book_.insert(side, tick, now_);

        v_ = genoa_update_volatility(v_, price_ - x_prev, cfg_.lambda, cfg_.v_cap);
        if (v_ >= cfg_.v_cap) diverged_ = true;
        return trade;
    }

    std::int64_t price() const { return price_; }
    double volatility() const { return v_; }
    bool diverged() const { return diverged_; }
    const Book& book() const { return book_; }
    std::int64_t now() const { return now_; }
    void set_g(double g) { cfg_.g = g; }
    void reset_diverged() { diverged_ = false; }

    struct RunResult {
        PricePath path;
        std::vector<double> v;  // per-step volatility over the measured window
        bool diverged = false;
        double mean_v = 0.0;
    };

    RunResult run(bool record_v = false) {
        for (std::int64_t t = 0; t < cfg_.burn_in; ++t) step();
        RunResult res;
        res.path.steps = cfg_.steps;
        res.path.x0 = price_;
        res.path.x.reserve(static_cast<std::size_t>(cfg_.steps));
        if (record_v) res.v.reserve(static_cast<std::size_t>(cfg_.steps));
        double acc = 0.0;
        for (std::int64_t t = 1; t <= cfg_.steps; ++t) {
            if (auto trade = step()) res.path.trades.push_back({t, *trade});
            res.path.x.push_back(price_);
            if (record_v) res.v.push_back(v_);
            acc += v_;
        }
        res.diverged = diverged_;
        res.mean_v = acc / static_cast<double>(cfg_.steps);
        return res;
    }

private:
    GenoaConfig cfg_;
    RngStream rng_;
    Book book_;
    double v_;
    std::int64_t price_ = 0;
    std::int64_t now_ = 0;
    bool diverged_ = false;
};

struct GenoaPhasePoint {
    double g = 0.0;
    double mean_v = 0.0;
    double alpha = std::nan("");  // Hill tail index of nonzero |r|; NaN when diverged
    bool diverged = false;
    std::size_t n_tail = 0;
};

struct GenoaSweepResult {
    std::vector<GenoaPhasePoint> points;
    double gc_first_diverged = std::nan("");  // method (a): smallest diverged g
    double gc_extrapolated = std::nan("");    // method (b): (alpha - 1) -> 0
};

namespace detail {

inline GenoaPhasePoint genoa_phase_point(GenoaConfig cfg, double g, std::uint64_t seed,
                                         double hill_quantile = 0.95) {
    cfg.g = g;
    GenoaModel model(cfg, seed);
    auto res = model.run(false);
    GenoaPhasePoint pt;
    pt.g = g;
    pt.mean_v = res.mean_v;
    pt.diverged = res.diverged;
    if (!res.diverged) {
        std::vector<double> abs_r;
        std::int64_t prev = res.path.x0;
        for (std::int64_t v : res.path.x) {
            if (v != prev) abs_r.push_back(static_cast<double>(std::llabs(v - prev)));
            prev = v;
        }
        if (abs_r.size() >= 100) {
            try {
                const HillFit f = hill_alpha(std::move(abs_r), hill_quantile);
                pt.alpha = f.alpha;
                pt.n_tail = f.n_tail;
            } catch (const std::invalid_argument&) {
            }
        }
    }
    return pt;
}

}  // namespace detail

/// Phase-transition sweep over an ascending g grid: time-averaged volatility,
/// Hill tail exponent, divergence flag per point, and two g_c estimates.
/// The extrapolation fits (alpha - 1) against g over the non-diverged points
/// with 0 < alpha - 1 <= 6 (the near-critical branch) and solves for alpha = 1.
inline GenoaSweepResult genoa_sweep_gc(const GenoaConfig& base, const std::vector<double>& g_grid,
                                       std::uint64_t seed, int threads = 1,
                                       double hill_quantile = 0.95) {
    if (!std::is_sorted(g_grid.begin(), g_grid.end()))
        throw std::invalid_argument("genoa_sweep_gc: g grid must ascend");
    GenoaSweepResult out;
    out.points.resize(g_grid.size());
    const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(g_grid.size())));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= g_grid.size()) return;
            out.points[i] = detail::genoa_phase_point(base, g_grid[i], seed + i, hill_quantile);
        }
    };
    if (n_workers == 1) {
        work();
    } else {
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    for (const auto& pt : out.points)
        if (pt.diverged) {
            out.gc_first_diverged = pt.g;
            break;
        }
    std::vector<double> gx, ay;
    for (const auto& pt : out.points)
        if (!pt.diverged && std::isfinite(pt.alpha) && pt.alpha > 1.0 && pt.alpha <= 7.0) {
            gx.push_back(pt.g);
            ay.push_back(pt.alpha - 1.0);
        }
    if (gx.size() >= 2) {
        const double n = static_cast<double>(gx.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < gx.size(); ++i) {
            sx += gx[i];
            sy += ay[i];
            sxx += gx[i] * gx[i];
            sxy += gx[i] * ay[i];
        }
        const double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
        const double intercept = sy / n - slope * sx / n;
        if (slope < 0.0) out.gc_extrapolated = -intercept / slope;
    }
    return out;
}

struct GenoaHysteresis {
    std::vector<double> g;        // grid as traversed upward
    std::vector<double> mean_v_up;
    std::vector<double> mean_v_down;
    std::vector<bool> diverged_up;
    std::vector<bool> diverged_down;
};

/// Sweeps g upward then downward with warm starts: each leg continues from
/// the previous leg's final book, price, and volatility. Inherently serial.
/// mean_v per leg is taken over the second half of the leg, past the
/// warm-start transient.
inline GenoaHysteresis genoa_hysteresis(const GenoaConfig& base, const std::vector<double>& g_up,
                                        std::uint64_t seed) {
    if (!std::is_sorted(g_up.begin(), g_up.end()))
        throw std::invalid_argument("genoa_hysteresis: g grid must ascend");
    if (g_up.empty()) throw std::invalid_argument("genoa_hysteresis: empty grid");
    GenoaHysteresis out;
    out.g = g_up;
    out.mean_v_up.resize(g_up.size());
    out.mean_v_down.resize(g_up.size());
    out.diverged_up.resize(g_up.size());
    out.diverged_down.resize(g_up.size());

    GenoaConfig cfg = base;
    cfg.g = g_up.front();
    GenoaModel model(cfg, seed);
    for (std::int64_t t = 0; t < base.burn_in; ++t) model.step();

    auto leg = [&](double g) {
        model.set_g(g);
        model.reset_diverged();
        const std::int64_t half = base.steps / 2;
        for (std::int64_t t = 0; t < half; ++t) model.step();
        double acc = 0.0;
        for (std::int64_t t = half; t < base.steps; ++t) {
            model.step();
            acc += model.volatility();
        }
        return std::pair<double, bool>{acc / static_cast<double>(base.steps - half), model.diverged()};
    };

    for (std::size_t i = 0; i < g_up.size(); ++i) {
        const auto [mv, div] = leg(g_up[i]);
        out.mean_v_up[i] = mv;
        out.diverged_up[i] = div;
    }
    for (std::size_t i = g_up.size(); i-- > 0;) {
        const auto [mv, div] = leg(g_up[i]);
        out.mean_v_down[i] = mv;
        out.diverged_down[i] = div;
    }
    return out;
}

/// Critical feedback factor by bisection on "the run diverges within the
/// probe length". Used for the phase-diagram scan over b.
inline double genoa_find_gc(GenoaConfig base, double g_lo, double g_hi, int iters,
                            std::uint64_t seed) {
    auto diverges = [&](double g, std::uint64_t s) {
        base.g = g;
        GenoaModel model(base, s);
        for (std::int64_t t = 0; t < base.burn_in + base.steps; ++t) {
            model.step();
            if (model.diverged()) return true;
        }
        return false;
    };
    // widen until the bracket actually straddles the transition
    std::uint64_t probe = seed;
    int guard = 0;
    while (diverges(g_lo, probe++) && guard++ < 16) g_lo *= 0.5;
    guard = 0;
    while (!diverges(g_hi, probe++) && guard++ < 16) g_hi *= 2.0;
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (g_lo + g_hi);
        if (diverges(mid, seed + 1000 + static_cast<std::uint64_t>(i)))
            g_hi = mid;
        else
            g_lo = mid;
    }
    return 0.5 * (g_lo + g_hi);
}

}  // namespace oblab
