#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qkdlab {

// splitmix64 finalizer; used to derive independent child seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seedable generator. All stochastic operations take one of these (or a
/// seed) explicitly; uniform draws are built from raw 64-bit output so that
/// streams are reproducible bit for bit across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    int bit() { return static_cast<int>(eng_() & 1ULL); }

    /// Seed for an independent child stream.
    std::uint64_t child_seed() { return mix64(eng_()); }

    Rng split() { return Rng(child_seed()); }

private:
    std::mt19937_64 eng_;
};

}  // namespace qkdlab
