#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace oblab {

/// Seeded random stream used by every model and estimator.
///
/// The engine is std::mt19937_64 (its output sequence is fixed by the
/// standard), and all derived draws below are implemented here rather than
/// with std:: distributions, whose output is implementation-defined. Same
/// seed + same call sequence = same numbers on any platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0,1) with 53-bit resolution.
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return u01() < p; }

    /// Unbiased uniform integer on [0, n). n must be >= 1.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n == 0");
        std::uint64_t x, r;
        do {
            x = next_u64();
            r = x % n;
        } while (x - r > std::uint64_t(0) - n);  // reject the incomplete top block
        return r;
    }

    /// Unbiased uniform integer on [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
        const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        if (span == 0) {  // full 64-bit range
            return static_cast<std::int64_t>(next_u64());
        }
        return lo + static_cast<std::int64_t>(uniform_index(span));
    }

    /// +1 or -1 with equal probability.
    int sign() { return (next_u64() & 1u) ? 1 : -1; }

    /// Uniformly chosen element of a non-empty container.
    template <class Container>
    auto& pick(Container& c) {
        return c[uniform_index(c.size())];
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

}  // namespace oblab
