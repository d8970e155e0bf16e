#include "qnd/random.hpp"

#include <cmath>

namespace qnd {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t trajectory_index) noexcept {
    return splitmix64(splitmix64(master_seed) + trajectory_index * 0x9e3779b97f4a7c15ULL);
}

RandomStream make_stream(std::uint64_t master_seed, std::uint64_t trajectory_index) {
    return RandomStream(derive_stream_seed(master_seed, trajectory_index));
}

double uniform01(RandomStream& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exponential_time(RandomStream& rng, double rate) noexcept {
    return -std::log1p(-uniform01(rng)) / rate;
}

} // namespace qnd
