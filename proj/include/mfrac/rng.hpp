#pragma once
#include <cstdint>

namespace mfrac {

// SplitMix64. Used instead of <random> engines+distributions because the
// standard distributions are implementation-defined: artifacts must be
// reproducible from the seed alone, independent of the standard library.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53-bit resolution
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [a, b)
    double uniform(double a, double b) { return a + (b - a) * next_double(); }
};

// Decorrelated stream for (seed, index) pairs, e.g. per-member corpus seeds.
inline uint64_t substream(uint64_t seed, uint64_t index) {
    SplitMix64 r(seed ^ (0x632be59bd9b4e019ull * (index + 1)));
    r.next_u64();
    return r.next_u64();
}

} // namespace mfrac
