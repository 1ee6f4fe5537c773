#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oblab {

/// One executed trade: the step it happened on and the executed tick.
struct Trade {
    std::int64_t t;
    std::int64_t price;
};

/// Price history of one run.
///
/// The price is piecewise constant between trades. Step-driven models record
/// the dense per-step series `x` (x[t] = price after step t, t = 1..steps);
/// the BPS runs, whose step counts make a dense series impractical, record
/// trades only and expose the same path through price_at(). `step_time` is
/// the physical duration of one step (1/(2N) for BPS, 1 otherwise).
struct PricePath {
    std::int64_t x0 = 0;
    std::int64_t steps = 0;
    std::int64_t burn_in = 0;
    double step_time = 1.0;
    std::vector<std::int64_t> x;   // dense series; empty in sparse mode
    std::vector<Trade> trades;

    bool dense() const { return !x.empty(); }

    /// Price after step t (t = 0 gives x0). Works in both modes.
    std::int64_t price_at(std::int64_t t) const {
        if (t < 0 || t > steps) throw std::out_of_range("PricePath::price_at");
        if (dense()) return t == 0 ? x0 : x[static_cast<std::size_t>(t - 1)];
        auto it = std::upper_bound(trades.begin(), trades.end(), t,
                                   [](std::int64_t v, const Trade& tr) { return v < tr.t; });
        return it == trades.begin() ? x0 : std::prev(it)->price;
    }

    /// One-step return r_t = x_t - x_{t-1}; zero on non-trade steps.
    std::int64_t step_return(std::int64_t t) const {
        if (t < 1 || t > steps) throw std::out_of_range("PricePath::step_return");
        if (!dense()) throw std::logic_error("PricePath::step_return: sparse path");
        const std::int64_t prev = t == 1 ? x0 : x[static_cast<std::size_t>(t - 2)];
        return x[static_cast<std::size_t>(t - 1)] - prev;
    }
};

}  // namespace oblab
