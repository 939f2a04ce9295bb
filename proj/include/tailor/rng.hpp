#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tailor {

using Rng = std::mt19937_64;

// splitmix64 finalizer. Used to stretch and mix seed material.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e9b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a, 64 bit. Stable across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Per-user nightly seed: a pure function of (master seed, user id, plan
// day), so one user's draws never depend on another user's events.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view user_id,
                                    std::int64_t plan_epoch_day) {
    std::uint64_t s = mix64(master ^ fnv1a(user_id));
    return mix64(s ^ static_cast<std::uint64_t>(plan_epoch_day));
}

// Uniform in [0, 1). 53-bit mantissa construction; the draw sequence is
// fully determined by the mt19937_64 output stream, which the standard
// pins down, unlike the std distribution templates.
inline double uniform_double(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Rejection sampling, no modulo bias.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

}  // namespace tailor
