#pragma once

#include <cstdint>
#include <random>

namespace oim {

// splitmix64 (Steele/Lea/Flood). One-shot avalanche of a 64-bit value.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives the seed for work item `index` from a master seed. Every sample,
// simulation run and world gets its own engine this way, so results do not
// depend on how indices are distributed over worker threads.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x9e3779b97f4a7c15ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t index) {
    return std::mt19937_64(mix_seed(master, index));
}

} // namespace oim
