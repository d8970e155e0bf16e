// random.hpp: reproducible per-trajectory random streams.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qnd {

using RandomStream = std::mt19937_64;

// Recorded in output metadata so ensembles can be regenerated elsewhere.
inline constexpr std::string_view kStreamDerivation =
    "mt19937_64 seeded with splitmix64(splitmix64(master) + index * 0x9e3779b97f4a7c15)";

// splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// For a fixed master seed this is a bijection of the trajectory index, so
// distinct trajectories never share a seed.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t trajectory_index) noexcept;

RandomStream make_stream(std::uint64_t master_seed, std::uint64_t trajectory_index);

// Uniform on [0, 1) from the top 53 bits of one draw.
double uniform01(RandomStream& rng) noexcept;

// Exponential waiting time with the given rate (> 0).
double exponential_time(RandomStream& rng, double rate) noexcept;

} // namespace qnd
