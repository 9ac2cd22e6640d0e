#pragma once

#include <cstdint>
#include <random>

namespace levylab {

using Engine = std::mt19937_64;

// A reproducible random stream. Identical (seed, stream_id) pairs produce
// identical engines. Ensembles fan out with child(k): the k-th child depends
// only on (seed, stream_id, k), so adding paths never reshuffles earlier ones.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    Engine engine() const;
    RngStream child(std::uint64_t index) const;

    friend bool operator==(const RngStream&, const RngStream&) = default;
};

// Fixed tags for RngStream::child used by the verifiers, so that different
// experiments started from one master stream never share noise.
namespace stream_tag {
inline constexpr std::uint64_t kConditions = 1;
inline constexpr std::uint64_t kNoiseTests = 2;
inline constexpr std::uint64_t kSimulate = 3;
inline constexpr std::uint64_t kVerifyA0 = 10;
inline constexpr std::uint64_t kVerifyA12 = 12;
inline constexpr std::uint64_t kVerifyA13 = 13;
inline constexpr std::uint64_t kVerifyEProperty = 14;
inline constexpr std::uint64_t kAccess = 20;
inline constexpr std::uint64_t kErgodic = 21;
inline constexpr std::uint64_t kLyapunov = 22;
}  // namespace stream_tag

// Uniform on the open interval (0,1); never returns 0 or 1.
double uniform_open(Engine& eng);

}  // namespace levylab
