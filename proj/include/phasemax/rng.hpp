#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace phasemax {

using Rng = std::mt19937_64;

//! One splitmix64 step; bijective mixing of a 64-bit word.
std::uint64_t splitmix64(std::uint64_t x);

//! Derives a child seed from a parent seed and a key path.
//!
//! The result depends only on (seed, keys), never on call order, so trials
//! dispatched to different workers get the same streams.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace phasemax
