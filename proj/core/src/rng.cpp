#include "levylab/rng.hpp"

namespace levylab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

Engine RngStream::engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    return Engine(seq);
}

RngStream RngStream::child(std::uint64_t index) const {
    return {seed, splitmix64(splitmix64(stream_id) ^ splitmix64(~index))};
}

double uniform_open(Engine& eng) {
    // 53 random bits, shifted off both endpoints.
    const std::uint64_t bits = eng() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace levylab
