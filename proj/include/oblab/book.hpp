#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "oblab/rng.hpp"

namespace oblab {

enum class Side : std::uint8_t { Bid, Ask };

inline Side opposite(Side s) { return s == Side::Bid ? Side::Ask : Side::Bid; }

/// One resting limit order. Unit volume; `birth` is the step it was deposited.
struct Order {
    Side side;
    std::int64_t price;
    std::int64_t birth;
};

/// Two-sided multiset of resting orders on an integer price axis.
///
/// Storage: one slot vector shared by both sides, a sorted map tick -> level
/// per side (each level is an intrusive FIFO list, so ties at the best tick
/// are removed oldest-insertion-first), and a flat index of live slots for
/// O(1) uniform removal. With `track_ages` a queue in insertion order backs
/// expire(); births must then be non-decreasing, which every model satisfies.
class Book {
public:
    explicit Book(bool track_ages = false) : track_ages_(track_ages) {}

    std::size_t size() const { return flat_.size(); }
    std::size_t size(Side s) const { return s == Side::Bid ? n_bids_ : n_asks_; }
    bool empty() const { return flat_.empty(); }

    void insert(Side side, std::int64_t price, std::int64_t birth) {
        const std::uint32_t id = acquire(side, price, birth);
        Level& lvl = levels(side)[price];
        link_back(lvl, id);
        if (track_ages_) ages_.emplace_back(id, slots_[id].gen);
    }

    /// Highest bid / lowest ask tick; empty side gives nullopt.
    std::optional<std::int64_t> best(Side side) const {
        const auto& m = levels(side);
        if (m.empty()) return std::nullopt;
        return side == Side::Bid ? m.rbegin()->first : m.begin()->first;
    }

    /// Removes and returns the oldest order at the best tick of `side`.
    Order remove_best(Side side) {
        auto& m = levels(side);
        if (m.empty()) throw std::logic_error("Book::remove_best: side empty");
        auto it = side == Side::Bid ? std::prev(m.end()) : m.begin();
        const std::uint32_t id = it->second.head;
        return release(side, it, id);
    }

    /// Removes one order chosen uniformly among all stored orders.
    Order remove_uniform(RngStream& rng) {
        if (flat_.empty()) throw std::logic_error("Book::remove_uniform: book empty");
        const std::uint32_t id = flat_[rng.uniform_index(flat_.size())];
        const Slot& s = slots_[id];
        auto& m = levels(s.side);
        return release(s.side, m.find(s.price), id);
    }

    /// Removes every order with birth <= now - lifetime, invoking `on_removed`
    /// for each. Returns the count.
    template <class Fn>
    int expire(std::int64_t now, std::int64_t lifetime, Fn&& on_removed) {
        if (!track_ages_) throw std::logic_error("Book::expire: age tracking disabled");
        if (lifetime < 1) throw std::invalid_argument("Book::expire: lifetime < 1");
        int removed = 0;
        while (!ages_.empty()) {
            const auto [id, gen] = ages_.front();
            if (!slots_[id].alive || slots_[id].gen != gen) {  // already gone
                ages_.pop_front();
                continue;
            }
            if (slots_[id].birth > now - lifetime) break;
            const Slot& s = slots_[id];
            on_removed(release(s.side, levels(s.side).find(s.price), id));
            ages_.pop_front();
            ++removed;
        }
        return removed;
    }

    int expire(std::int64_t now, std::int64_t lifetime) {
        return expire(now, lifetime, [](const Order&) {});
    }

    template <class Fn>
    void for_each(Fn&& fn) const {
        for (std::uint32_t id : flat_) {
            const Slot& s = slots_[id];
            fn(Order{s.side, s.price, s.birth});
        }
    }

private:
    static constexpr std::uint32_t npos = 0xffffffffu;

    struct Slot {
        Side side{};
        std::int64_t price = 0;
        std::int64_t birth = 0;
        std::uint32_t gen = 0;
        std::uint32_t prev = npos, next = npos;
        std::uint32_t flat_pos = npos;
        bool alive = false;
    };

    struct Level {
        std::uint32_t head = npos, tail = npos;
        std::uint32_t count = 0;
    };

    using LevelMap = std::map<std::int64_t, Level>;

    LevelMap& levels(Side s) { return s == Side::Bid ? bids_ : asks_; }
    const LevelMap& levels(Side s) const { return s == Side::Bid ? bids_ : asks_; }

    std::uint32_t acquire(Side side, std::int64_t price, std::int64_t birth) {
        std::uint32_t id;
        if (!free_.empty()) {
            id = free_.back();
            free_.pop_back();
        } else {
            id = static_cast<std::uint32_t>(slots_.size());
            slots_.emplace_back();
        }
        Slot& s = slots_[id];
        s.side = side;
        s.price = price;
        s.birth = birth;
        s.prev = s.next = npos;
        s.alive = true;
        s.flat_pos = static_cast<std::uint32_t>(flat_.size());
        flat_.push_back(id);
        (side == Side::Bid ? n_bids_ : n_asks_)++;
        return id;
    }

    void link_back(Level& lvl, std::uint32_t id) {
        if (lvl.tail == npos) {
            lvl.head = lvl.tail = id;
        } else {
            slots_[lvl.tail].next = id;
            slots_[id].prev = lvl.tail;
            lvl.tail = id;
        }
        ++lvl.count;
    }

    Order release(Side side, LevelMap::iterator it, std::uint32_t id) {
        Slot& s = slots_[id];
        Level& lvl = it->second;
        if (s.prev != npos) slots_[s.prev].next = s.next; else lvl.head = s.next;
        if (s.next != npos) slots_[s.next].prev = s.prev; else lvl.tail = s.prev;
        if (--lvl.count == 0) levels(side).erase(it);

        const std::uint32_t moved = flat_.back();
        flat_[s.flat_pos] = moved;
        slots_[moved].flat_pos = s.flat_pos;
        flat_.pop_back();

        Order out{s.side, s.price, s.birth};
        s.alive = false;
        ++s.gen;
        free_.push_back(id);
        (side == Side::Bid ? n_bids_ : n_asks_)--;
        return out;
    }

    bool track_ages_;
    std::vector<Slot> slots_;
    std::vector<std::uint32_t> free_;
    std::vector<std::uint32_t> flat_;
    std::deque<std::pair<std::uint32_t, std::uint32_t>> ages_;
    LevelMap bids_, asks_;
    std::size_t n_bids_ = 0, n_asks_ = 0;
};

}  // namespace oblab
