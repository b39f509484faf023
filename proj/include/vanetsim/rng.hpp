#pragma once

#include <cstdint>
#include <stdexcept>

namespace vanetsim {

/// Deterministic 64-bit generator (splitmix64). The sequence depends only
/// on the seed, so runs are reproducible across platforms. Baseline
/// scenarios draw nothing from it; it exists for schemes that sample.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0, bound). bound must be >= 1.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) {
            throw std::invalid_argument("RngStream::next_below: bound must be >= 1");
        }
        return next_u64() % bound;
    }

    /// Uniform draw in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

} // namespace vanetsim
