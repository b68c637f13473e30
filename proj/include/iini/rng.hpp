#pragma once

#include <cstddef>
#include <cstdint>

namespace iini {

/// Counter-based PRNG (splitmix64). The state advances by a fixed odd
/// increment so the n-th output is a pure function of (seed, n). Unlike the
/// std:: distributions, the stream is identical across platforms and
/// standard-library implementations, which is what makes runs reproducible.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform index in [0, n). Multiply-shift; bias is O(n / 2^64).
    std::size_t next_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

/// Mixes a base seed with a stream label (e.g. a segment id) into the seed
/// of an independent derived chain.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t label) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (label + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace iini
