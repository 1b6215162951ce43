#pragma once

#include <cstdint>

namespace hcache {

// Counter-based pseudo-random generator (splitmix64 over a hashed counter).
// Every draw is a pure function of (seed, stream, counter), so positions,
// walks and experiment cells can be generated in any order, on any thread,
// and still come out bitwise identical.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    // Raw 64-bit draw for a (stream, counter) pair.
    std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
        std::uint64_t x = seed_;
        x = mix(x ^ (0x9e3779b97f4a7c15ULL + stream * 0xbf58476d1ce4e5b9ULL));
        x = mix(x ^ (0x94d049bb133111ebULL + counter * 0xff51afd7ed558ccdULL));
        return mix(x);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform(std::uint64_t stream, std::uint64_t counter) const {
        return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t stream, std::uint64_t counter, std::uint64_t n) const {
        return static_cast<std::uint64_t>(uniform(stream, counter) * static_cast<double>(n)) % n;
    }

    std::uint64_t seed() const { return seed_; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

// Stream tags; keep stable, they are part of the reproducibility contract.
namespace rng_stream {
inline constexpr std::uint64_t kUserPosition = 1;
inline constexpr std::uint64_t kRandomWalk = 2;
inline constexpr std::uint64_t kTestInstance = 100;
}  // namespace rng_stream

}  // namespace hcache
