// Counter-based random numbers (Philox4x32-10).
//
// Every draw is a pure function of (seed, path, index), so Monte Carlo runs
// are reproducible regardless of path evaluation order and independent paths
// never share draws.
#pragma once

#include <array>
#include <cstdint>

namespace swing {

// One Philox4x32-10 block: four 32-bit words from a 128-bit counter and a
// 64-bit key.
std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& counter,
                                   const std::array<uint32_t, 2>& key);

// 64-bit draw number `index` on stream (seed, path).
uint64_t draw_u64(uint64_t seed, uint64_t path, uint64_t index);

// Uniform double in [0, 1) with 53 random bits.
double draw_unit(uint64_t seed, uint64_t path, uint64_t index);

} // namespace swing
