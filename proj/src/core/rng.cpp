#include "rng.hpp"

namespace swing {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<uint32_t, 4>& x, const std::array<uint32_t, 2>& k) {
    const uint64_t p0 = static_cast<uint64_t>(kMul0) * x[0];
    const uint64_t p1 = static_cast<uint64_t>(kMul1) * x[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

} // namespace

std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& counter,
                                   const std::array<uint32_t, 2>& key) {
    std::array<uint32_t, 4> x = counter;
    std::array<uint32_t, 2> k = key;
    round_once(x, k);
    for (int r = 1; r < 10; ++r) {
        k[0] += kWeyl0;
        k[1] += kWeyl1;
        round_once(x, k);
    }
    return x;
}

uint64_t draw_u64(uint64_t seed, uint64_t path, uint64_t index) {
    const std::array<uint32_t, 4> counter = {
        static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32),
        static_cast<uint32_t>(path), static_cast<uint32_t>(path >> 32)};
    const std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed),
                                         static_cast<uint32_t>(seed >> 32)};
    const std::array<uint32_t, 4> out = philox4x32(counter, key);
    return (static_cast<uint64_t>(out[1]) << 32) | out[0];
}

double draw_unit(uint64_t seed, uint64_t path, uint64_t index) {
    return static_cast<double>(draw_u64(seed, path, index) >> 11) * 0x1.0p-53;
}

} // namespace swing
