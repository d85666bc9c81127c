#pragma once

#include <cstdint>

namespace rmtlab {

// Counter-based random stream. Every output is a pure function of
// (seed, index, draw), so parallel schedules cannot reorder a stream:
// value i of a stream is always derived from the same counters.
//
// The mixing function is the splitmix64 finalizer (Steele, Lea, Flood;
// same avalanche stage as MurmurHash3) applied to a Weyl-sequence
// combination of the three words.
namespace rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t avalanche(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

// 64 mixed bits for counter `index` of stream `seed`.
inline std::uint64_t bits(std::uint64_t seed, std::uint64_t index) {
    return avalanche(seed + kGolden * (index + 1));
}

// Sub-draw `draw` of counter `index`: rejection samplers burn draws
// inside an index without touching neighbouring indices.
inline std::uint64_t bits(std::uint64_t seed, std::uint64_t index, std::uint64_t draw) {
    return avalanche(bits(seed, index) + kGolden * (draw + 1));
}

// Derives an independent stream seed; used for per-trial seeding.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return avalanche(avalanche(seed + kGolden * (a + 1)) + kGolden * (b + 1));
}

// Uniform on (0,1]: 53-bit mantissa, never zero (safe under log()).
inline double uniform_pos(std::uint64_t word) {
    return static_cast<double>((word >> 11) + 1) * 0x1.0p-53;
}

// Uniform on [0,1).
inline double uniform01(std::uint64_t word) {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

} // namespace rng
} // namespace rmtlab
