#pragma once
// Seedable, splittable pseudo-random source.
//
// The generator is splitmix64 (Steele/Lea/Flood, "Fast splittable pseudorandom
// number generators"; constants from Vigna's reference implementation).
// Substreams are derived by hashing the (seed, stream index) pair through the
// same finalizer, so parallel consumers get decorrelated, reproducible streams
// that do not depend on scheduling order.

#include <cstdint>

namespace evb {

class Splitmix64 {
public:
    explicit Splitmix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    // Fair coin from the top bit.
    bool coin() { return (next() >> 63) != 0; }

private:
    std::uint64_t state_;
};

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Splitmix64 substream(std::uint64_t seed, std::uint64_t stream) {
    return Splitmix64(substream_seed(seed, stream));
}

} // namespace evb
