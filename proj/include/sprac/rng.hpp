#pragma once

#include <cstdint>
#include <random>

namespace sprac {

// All randomness in the toolkit comes from std::mt19937_64, whose output
// sequence is fixed by the standard. Distributions are implemented here
// rather than with <random> distributions, which differ between vendors.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Derives an independent stream seed from a base seed and up to two indices.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) noexcept;

// Uniform integer in [0, bound). bound must be nonzero.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

} // namespace sprac
