#pragma once

#include <cstdint>
#include <string_view>

namespace decbench {

// FNV-1a, the stable 64-bit hash used for experiment seeds, file digests
// and feature hashing. Endianness-independent, identical on every platform.
inline uint64_t fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ull) {
    uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// splitmix64: tiny deterministic PRNG used to expand a feature hash into a
// dense pseudo-random vector. Not for sampling (decoders use mt19937_64).
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [-1, 1).
    double next_signed_unit() {
        return static_cast<double>(next() >> 11) * (2.0 / 9007199254740992.0) - 1.0;
    }
};

// 53-bit uniform in [0, 1). Used with mt19937_64 draws so that sampling does
// not depend on the standard library's distribution implementations.
inline double uniform_unit(uint64_t raw) {
    return static_cast<double>(raw >> 11) * 0x1.0p-53;
}

}  // namespace decbench
