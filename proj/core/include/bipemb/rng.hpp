#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace bipemb {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser; derives independent stream seeds from (seed, salt...).
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept
{
    return mix_seed(seed ^ mix_seed(salt + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept
{
    return derive_seed(derive_seed(seed, a), b);
}

/// Uniform integer in [0, bound) without relying on std::uniform_int_distribution,
/// so sampled streams are identical across standard libraries.
inline std::uint64_t uniform_below(Rng & rng, std::uint64_t bound)
{
    if (bound <= 1)
        return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do
        x = rng();
    while (x >= limit);
    return x % bound;
}

template <typename T>
void shuffle_in_place(std::vector<T> & v, Rng & rng)
{
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

/// First `count` entries of `pool` become a uniform random `count`-subset (partial Fisher–Yates).
template <typename T>
void partial_shuffle(std::vector<T> & pool, std::size_t count, Rng & rng)
{
    count = std::min(count, pool.size());
    for (std::size_t i = 0; i < count; ++i)
        std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
}

/// Uniform real in [0, 1).
inline double uniform_unit(Rng & rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace bipemb
