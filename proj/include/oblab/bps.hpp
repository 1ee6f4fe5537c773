#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oblab/book.hpp"
#include "oblab/price_path.hpp"
#include "oblab/rng.hpp"

namespace oblab {

/// Two-species diffusion-annihilation market: N bid and N ask particles
/// diffuse on {1..L}; a contact annihilates one pair, sets the price to the
/// contact tick, and reinjects a bid at 1 and an ask at L.
struct BpsConfig {
    std::int64_t L = 500;
    std::int64_t N = 200;
    std::int64_t steps = 0;     // measured elementary updates
    std::int64_t burn_in = 0;   // discarded elementary updates
};

/// Fluctuation-free stationary density profile (rho_B, rho_A) at position y.
inline std::pair<double, double> bps_meanfield_profile(const BpsConfig& cfg, double y) {
    if (y < 0.0 || y > static_cast<double>(cfg.L)) throw std::invalid_argument("bps_meanfield_profile: y outside [0, L]");
    const double L = static_cast<double>(cfg.L);
    const double pref = 8.0 * static_cast<double>(cfg.N) / (L * L);
    const double rho_b = y < L / 2.0 ? pref * (L / 2.0 - y) : 0.0;
    const double rho_a = y > L / 2.0 ? pref * (y - L / 2.0) : 0.0;
    return {rho_b, rho_a};
}

class BpsModel {
public:
    BpsModel(BpsConfig cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {
        if (cfg_.L < 2 || cfg_.L % 2 != 0) throw std::invalid_argument("BpsConfig: L must be even and >= 2");
        if (cfg_.N < 1) throw std::invalid_argument("BpsConfig: N must be >= 1");
        at_[0].assign(static_cast<std::size_t>(cfg_.L) + 1, {});
        at_[1].assign(static_cast<std::size_t>(cfg_.L) + 1, {});
        pos_[0].resize(static_cast<std::size_t>(cfg_.N));
        pos_[1].resize(static_cast<std::size_t>(cfg_.N));
        bucket_pos_[0].resize(static_cast<std::size_t>(cfg_.N));
        bucket_pos_[1].resize(static_cast<std::size_t>(cfg_.N));
        // bids uniform on the lower half, asks on the upper half
        for (std::size_t i = 0; i < static_cast<std::size_t>(cfg_.N); ++i) {
            place(0, i, rng_.uniform_int(1, cfg_.L / 2));
            place(1, i, rng_.uniform_int(cfg_.L / 2 + 1, cfg_.L));
        }
        price_ = cfg_.L / 2;
    }

    /// One elementary update: a uniformly chosen particle attempts a +-1 move.
    /// Returns the trade tick when the move ends in an annihilation.
    std::optional<std::int64_t> step() {
        const std::uint64_t k = rng_.uniform_index(2 * static_cast<std::uint64_t>(cfg_.N));
        const int sp = k < static_cast<std::uint64_t>(cfg_.N) ? 0 : 1;
        const std::size_t idx = static_cast<std::size_t>(sp == 0 ? k : k - static_cast<std::uint64_t>(cfg_.N));
        return apply_move(sp == 0 ? Side::Bid : Side::Ask, idx, rng_.sign());
    }

    /// Deterministic kernel behind step(): moves particle `idx` of `species`
    /// by dir (+1/-1). Moves leaving {1..L} are rejected; the clock advances
    /// either way.
    std::optional<std::int64_t> apply_move(Side species, std::size_t idx, int dir) {
        ++clock_;
        const int sp = species == Side::Bid ? 0 : 1;
        const std::int64_t np = pos_[sp][idx] + dir;
        if (np < 1 || np > cfg_.L) return std::nullopt;
        const int op = 1 - sp;
        auto& opp_bucket = at_[op][static_cast<std::size_t>(np)];
        if (!opp_bucket.empty()) {
            // annihilate with any one opposite particle (they are indistinguishable)
            const std::size_t partner = opp_bucket.back();
            displace(op, partner, op == 0 ? 1 : cfg_.L);   // bid reinjected at 1, ask at L
            displace(sp, idx, sp == 0 ? 1 : cfg_.L);
            price_ = np;
            return np;
        }
        displace(sp, idx, np);
        return std::nullopt;
    }

    std::int64_t price() const { return price_; }
    std::int64_t clock_steps() const { return clock_; }
    double time() const { return static_cast<double>(clock_) / (2.0 * static_cast<double>(cfg_.N)); }
    std::size_t count(Side s) const { return pos_[s == Side::Bid ? 0 : 1].size(); }
    const std::vector<std::int64_t>& positions(Side s) const { return pos_[s == Side::Bid ? 0 : 1]; }

    std::int64_t max_bid() const {
        std::int64_t m = 1;
        for (std::int64_t p : pos_[0]) m = std::max(m, p);
        return m;
    }
    std::int64_t min_ask() const {
        std::int64_t m = cfg_.L;
        for (std::int64_t p : pos_[1]) m = std::min(m, p);
        return m;
    }

    /// Burn-in then `steps` recorded updates. Sparse path: trades only, with
    /// step_time 1/(2N).
    PricePath run() {
        PricePath path = run_header();
        for (std::int64_t t = 0; t < cfg_.burn_in; ++t) step();
        path.x0 = price_;
        for (std::int64_t t = 1; t <= cfg_.steps; ++t)
            if (auto trade = step()) path.trades.push_back({t, *trade});
        return path;
    }

    /// Dense variant for small systems (per-update price series).
    PricePath run_dense() {
        PricePath path = run_header();
        for (std::int64_t t = 0; t < cfg_.burn_in; ++t) step();
        path.x0 = price_;
        path.x.reserve(static_cast<std::size_t>(cfg_.steps));
        for (std::int64_t t = 1; t <= cfg_.steps; ++t) {
            if (auto trade = step()) path.trades.push_back({t, *trade});
            path.x.push_back(price_);
        }
        return path;
    }

private:
    PricePath run_header() const {
        PricePath path;
        path.steps = cfg_.steps;
        path.burn_in = 0;  // burn-in is consumed before recording starts
        path.step_time = 1.0 / (2.0 * static_cast<double>(cfg_.N));
        return path;
    }

    void place(int sp, std::size_t idx, std::int64_t tick) {
        pos_[sp][idx] = tick;
        auto& b = at_[sp][static_cast<std::size_t>(tick)];
        bucket_pos_[sp][idx] = b.size();
        b.push_back(idx);
    }

    void unplace(int sp, std::size_t idx) {
        auto& b = at_[sp][static_cast<std::size_t>(pos_[sp][idx])];
        const std::size_t at = bucket_pos_[sp][idx];
        b[at] = b.back();
        bucket_pos_[sp][b[at]] = at;
        b.pop_back();
    }

    void displace(int sp, std::size_t idx, std::int64_t tick) {
        unplace(sp, idx);
        place(sp, idx, tick);
    }

    BpsConfig cfg_;
    RngStream rng_;
    std::vector<std::int64_t> pos_[2];                // [0] bids, [1] asks
    std::vector<std::size_t> bucket_pos_[2];
    std::vector<std::vector<std::size_t>> at_[2];     // per-tick particle indices
    std::int64_t price_ = 0;
    std::int64_t clock_ = 0;
};

}  // namespace oblab
