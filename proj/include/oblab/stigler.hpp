#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

#include "oblab/book.hpp"
#include "oblab/price_path.hpp"
#include "oblab/rng.hpp"

namespace oblab {

enum class StiglerVariant { Bounded, Free };

/// Stigler model: one random limit order per step, uniform on {1..L}
/// (Bounded) or on a window of d ticks shifted by s from the current price
/// (Free); orders expire after N steps; a crossing order trades at the best
/// opposite quote.
struct StiglerConfig {
    StiglerVariant variant = StiglerVariant::Bounded;
    std::int64_t L = 5000;  // Bounded: allowed price range {1..L}
    std::int64_t N = 5000;  // maximum order count == order lifetime
    std::int64_t s = 0;     // Free: window shift
    std::int64_t d = 0;     // Free: window width in ticks
    std::int64_t steps = 0;
    std::int64_t burn_in = 0;
};

/// Inclusive tick range for a new bid: the d consecutive ticks ending at
/// x - s + floor(d/2).
inline std::pair<std::int64_t, std::int64_t> stigler_bid_window(std::int64_t x, std::int64_t s,
                                                                std::int64_t d) {
    const std::int64_t hi = x - s + d / 2;
    return {hi - d + 1, hi};
}

/// Inclusive tick range for a new ask: the d consecutive ticks starting at
/// x + s - floor(d/2). Mirror image of the bid window about x.
inline std::pair<std::int64_t, std::int64_t> stigler_ask_window(std::int64_t x, std::int64_t s,
                                                                std::int64_t d) {
    const std::int64_t lo = x + s - d / 2;
    return {lo, lo + d - 1};
}

class StiglerModel {
public:
    StiglerModel(StiglerConfig cfg, std::uint64_t seed)
        : cfg_(cfg), rng_(seed), book_(/*track_ages=*/true) {
        if (cfg_.N < 1) throw std::invalid_argument("StiglerConfig: N must be >= 1");
        if (cfg_.variant == StiglerVariant::Bounded) {
            if (cfg_.L < 2) throw std::invalid_argument("StiglerConfig: L must be >= 2");
            price_ = cfg_.L / 2;
        } else {
            if (cfg_.d < 1) throw std::invalid_argument("StiglerConfig: d must be >= 1");
            if (cfg_.s < 0) throw std::invalid_argument("StiglerConfig: s must be >= 0");
            if (cfg_.d < 2 * cfg_.s) throw std::invalid_argument("StiglerConfig: need d >= 2s");
            price_ = 0;
        }
    }

    /// One step: expire the order from step t-N, then deposit a fresh one.
    /// Returns the trade price if the new order crossed.
    std::optional<std::int64_t> step() {
        ++now_;
        book_.expire(now_, cfg_.N);
        const Side side = rng_.uniform_index(2) == 0 ? Side::Bid : Side::Ask;
        return deposit_or_match(side, draw_tick(side));
    }

    /// Matching kernel: a crossing order trades at the best opposite quote
    /// and neither order rests; otherwise the order is stored.
    std::optional<std::int64_t> deposit_or_match(Side side, std::int64_t tick) {
        if (side == Side::Bid) {
            if (const auto ask = book_.best(Side::Ask); ask && tick >= *ask) {
                book_.remove_best(Side::Ask);
                price_ = *ask;
                return price_;
            }
        } else {
            if (const auto bid = book_.best(Side::Bid); bid && tick <= *bid) {
                book_.remove_best(Side::Bid);
                price_ = *bid;
                return price_;
            }
        }
        book_.insert(side, tick, now_);
        return std::nullopt;
    }

    std::int64_t draw_tick(Side side) {
        if (cfg_.variant == StiglerVariant::Bounded) return rng_.uniform_int(1, cfg_.L);
        const auto [lo, hi] = side == Side::Bid ? stigler_bid_window(price_, cfg_.s, cfg_.d)
                                                : stigler_ask_window(price_, cfg_.s, cfg_.d);
        return rng_.uniform_int(lo, hi);
    }

    std::int64_t price() const { return price_; }
    std::int64_t now() const { return now_; }
    const Book& book() const { return book_; }

    PricePath run() {
        for (std::int64_t t = 0; t < cfg_.burn_in; ++t) step();
        PricePath path;
        path.steps = cfg_.steps;
        path.x0 = price_;
        path.x.reserve(static_cast<std::size_t>(cfg_.steps));
        for (std::int64_t t = 1; t <= cfg_.steps; ++t) {
            if (auto trade = step()) path.trades.push_back({t, *trade});
            path.x.push_back(price_);
        }
        return path;
    }

protected:
    StiglerConfig cfg_;
    RngStream rng_;
    Book book_;
    std::int64_t price_ = 0;
    std::int64_t now_ = 0;
};

}  // namespace oblab
