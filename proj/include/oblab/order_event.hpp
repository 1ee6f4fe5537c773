#pragma once

#include <cstdint>
#include <string_view>

#include "oblab/book.hpp"

namespace oblab {

enum class EventCause : std::uint8_t { Match, Evaporate, Expire, End };

inline std::string_view to_string(EventCause c) {
    switch (c) {
        case EventCause::Match: return "match";
        case EventCause::Evaporate: return "evaporate";
        case EventCause::Expire: return "expire";
        case EventCause::End: return "end";
    }
    return "?";
}

inline std::string_view to_string(Side s) { return s == Side::Bid ? "bid" : "ask"; }

/// Lifetime of one resting order, for space-time chart output.
struct OrderEvent {
    std::int64_t birth;
    std::int64_t death;
    std::int64_t tick;
    Side side;
    EventCause cause;
};

}  // namespace oblab
