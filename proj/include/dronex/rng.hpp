#pragma once

#include <cstdint>

namespace dronex {

// splitmix64; used instead of <random> engines so that streams are
// identical across standard library implementations.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : state_(seed) {
        // warm up so that small seeds diverge immediately
        splitmix64(state_);
    }

    // Derives an independent stream, e.g. per-request sub-seeds.
    static Rng derive(std::uint64_t seed, std::uint64_t counter) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64(s);
        s = a ^ (counter * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL);
        return Rng(s);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        // modulo bias is irrelevant at our range sizes
        return n == 0 ? 0 : next_u64() % n;
    }

private:
    std::uint64_t state_;
};

}  // namespace dronex
