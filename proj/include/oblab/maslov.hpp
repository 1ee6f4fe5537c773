#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "oblab/book.hpp"
#include "oblab/order_event.hpp"
#include "oblab/price_path.hpp"
#include "oblab/rng.hpp"

namespace oblab {

struct EventProbs {
    double deposit;
    double satisfy;
    double evaporate;
};

/// Per-step event probabilities with N_t orders in the book:
/// W+dep = 1/D, W-sat = (1-q)/D, W-eva = q (N_t/Nbar) / D,
/// D = 2 + q (N_t/Nbar - 1). The evaporation entry is computed as the
/// complement so the three always sum to exactly 1.
inline EventProbs maslov_event_probs(std::int64_t n_t, double q, double nbar) {
    if (n_t < 0) throw std::invalid_argument("maslov_event_probs: N_t < 0");
    if (q < 0.0 || q >= 1.0) throw std::invalid_argument("maslov_event_probs: q must be in [0,1)");
    if (nbar < 1.0) throw std::invalid_argument("maslov_event_probs: Nbar must be >= 1");
    const double d = 2.0 + q * (static_cast<double>(n_t) / nbar - 1.0);
    EventProbs p{1.0 / d, (1.0 - q) / d, 0.0};
    p.evaporate = 1.0 - p.deposit - p.satisfy;
    return p;
}

enum class MaslovRemoval { Evaporation, FixedLifetime };

/// Maslov model: limit orders deposited at x +- 1, market orders execute the
/// best opposite quote, and resting orders leave either by uniform
/// evaporation (probability-q events) or after a fixed lifetime.
struct MaslovConfig {
    double q = 0.0;
    double nbar = 1000.0;
    MaslovRemoval removal = MaslovRemoval::Evaporation;
    std::int64_t lifetime = 0;  // FixedLifetime only
    std::int64_t steps = 0;
    std::int64_t burn_in = 0;
    bool record_events = false;
};

class MaslovModel {
public:
    enum class StepKind { Deposit, Trade, NoOp, Evaporate };

    MaslovModel(MaslovConfig cfg, std::uint64_t seed)
        : cfg_(cfg), rng_(seed), book_(cfg.removal == MaslovRemoval::FixedLifetime) {
        if (cfg_.q < 0.0 || cfg_.q >= 1.0) throw std::invalid_argument("MaslovConfig: q must be in [0,1)");
        if (cfg_.nbar < 1.0) throw std::invalid_argument("MaslovConfig: Nbar must be >= 1");
        if (cfg_.removal == MaslovRemoval::FixedLifetime && cfg_.lifetime < 1)
            throw std::invalid_argument("MaslovConfig: lifetime must be >= 1");
    }

    StepKind step() {
        ++now_;
        if (cfg_.removal == MaslovRemoval::FixedLifetime) {
            expire_aged();
            return rng_.uniform_index(2) == 0 ? do_deposit(coin_side()) : do_satisfy(coin_side());
        }
        const EventProbs p = maslov_event_probs(static_cast<std::int64_t>(book_.size()), cfg_.q, cfg_.nbar);
        const double u = rng_.u01();
        if (u < p.deposit) return do_deposit(coin_side());
        if (u < p.deposit + p.satisfy) return do_satisfy(coin_side());
        if (book_.empty()) return StepKind::NoOp;  // zero-probability guard
        return do_evaporate();
    }

    /// Deposits a limit order adjacent to the price (bid at x-1, ask at x+1).
    StepKind do_deposit(Side side) {
        book_.insert(side, side == Side::Bid ? price_ - 1 : price_ + 1, now_);
        return StepKind::Deposit;
    }

    /// Market order: `side` is the side of the RESTING order it consumes
    /// (a sell market order hits the best bid). An empty opposite side makes
    /// the step a no-op.
    StepKind do_satisfy(Side side) {
        if (book_.size(side) == 0) return StepKind::NoOp;
        const Order o = book_.remove_best(side);
        price_ = o.price;
        log_event(o, EventCause::Match);
        return StepKind::Trade;
    }

    StepKind do_evaporate() {
        const Order o = book_.remove_uniform(rng_);
        log_event(o, EventCause::Evaporate);
        return StepKind::Evaporate;
    }

    std::int64_t price() const { return price_; }
    std::int64_t now() const { return now_; }
    const Book& book() const { return book_; }

    struct RunResult {
        PricePath path;
        std::vector<OrderEvent> events;
    };

    RunResult run() {
        for (std::int64_t t = 0; t < cfg_.burn_in; ++t) step();
        RunResult res;
        res.path.steps = cfg_.steps;
        res.path.x0 = price_;
        res.path.x.reserve(static_cast<std::size_t>(cfg_.steps));
        record_from_ = now_;
        for (std::int64_t t = 1; t <= cfg_.steps; ++t) {
            const StepKind kind = step();
            if (kind == StepKind::Trade) res.path.trades.push_back({t, price_});
            res.path.x.push_back(price_);
        }
        if (cfg_.record_events) {
            book_.for_each([&](const Order& o) {
                events_.push_back({o.birth - record_from_, cfg_.steps, o.price, o.side, EventCause::End});
            });
            res.events = std::move(events_);
        }
        return res;
    }

protected:
    Side coin_side() { return rng_.uniform_index(2) == 0 ? Side::Bid : Side::Ask; }

    void expire_aged() {
        book_.expire(now_, cfg_.lifetime,
                     [&](const Order& o) { log_event(o, EventCause::Expire); });
    }

    void log_event(const Order& o, EventCause cause) {
        if (!cfg_.record_events) return;
        events_.push_back({o.birth - record_from_, now_ - record_from_, o.price, o.side, cause});
    }

    MaslovConfig cfg_;
    RngStream rng_;
    Book book_;
    std::int64_t price_ = 0;
    std::int64_t now_ = 0;
    std::int64_t record_from_ = 0;
    std::vector<OrderEvent> events_;
};

}  // namespace oblab
