#pragma once

// SplitMix64 used as a counter-based generator: output k of stream `seed` is
//
//   z = seed + (k + 1) * 0x9E3779B97F4A7C15          (mod 2^64)
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   out = z ^ (z >> 31)
//
// which is exactly the sequential SplitMix64 stream started at `seed`, but
// any element can be computed directly. Uniform doubles take the top 53 bits:
// u = (out >> 11) * 2^-53, in [0, 1).
//
// Test vectors (seed 1234567): 6457827717110365317, 3203168211198807973,
// 9817491932198370423, 4593380528125082431, 16408922859458223821.

#include <cstdint>

namespace corrnoise {

[[nodiscard]] constexpr std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t z = seed + (k + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31U);
}

class CounterRng {
  public:
    explicit constexpr CounterRng(std::uint64_t seed) : seed_(seed) {}

    constexpr std::uint64_t next_u64() { return splitmix64_at(seed_, counter_++); }

    /// Uniform in [0, 1) with 53 random bits.
    constexpr double next_double() {
        return static_cast<double>(next_u64() >> 11U) * 0x1.0p-53;
    }

    [[nodiscard]] constexpr std::uint64_t seed() const { return seed_; }
    [[nodiscard]] constexpr std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace corrnoise
