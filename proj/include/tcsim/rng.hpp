#pragma once

// Counter-based generator: every draw is a pure function of (key, counter),
// so streams can be split by key and replayed on any platform without
// depending on std:: distribution implementations.

#include <cstdint>

namespace tcsim {

class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

    /// Independent child stream; children of distinct ids never share keys
    /// with high probability.
    constexpr CounterRng split(std::uint64_t stream_id) const {
        return CounterRng(mix(key_ ^ mix(stream_id + 0x632BE59BD9B4E019ull)));
    }

    constexpr std::uint64_t bits(std::uint64_t counter) const {
        return mix(key_ + mix(counter ^ 0x9E3779B97F4A7C15ull));
    }

    /// Uniform on [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t key() const { return key_; }

private:
    // splitmix64 finalizer
    static constexpr std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
};

}  // namespace tcsim
