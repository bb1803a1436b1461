#include "sprac/rng.hpp"

namespace sprac {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) noexcept
{
    return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound)
{
    // Draws below 2^64 mod bound are rejected so every residue is equally likely.
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t draw = rng();
    while (draw < threshold) {
        draw = rng();
    }
    return draw % bound;
}

} // namespace sprac
