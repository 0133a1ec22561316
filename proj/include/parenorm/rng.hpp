#pragma once

#include <cstdint>

namespace parenorm {

// splitmix64: tiny, portable, and independent of the standard library's
// distribution implementations, so seeded sample sets are reproducible
// byte-for-byte across platforms.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform integer in [0, n)
    uint64_t below(uint64_t n) { return next() % n; }

    // uniform integer in [lo, hi] inclusive
    int64_t range(int64_t lo, int64_t hi) {
        return lo + int64_t(below(uint64_t(hi - lo + 1)));
    }

    bool coin() { return (next() & 1) != 0; }
};

}  // namespace parenorm
