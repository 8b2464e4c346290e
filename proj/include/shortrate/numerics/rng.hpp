#pragma once

#include <cstdint>
#include <random>

namespace shortrate::numerics {

/// SplitMix64 finalizer; derives decorrelated sub-seeds from (seed, stream).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Standard-normal stream over a 64-bit Mersenne Twister. Each block of Monte-Carlo
/// paths owns one stream, so results do not depend on how blocks map to workers.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream) : engine_(mix_seed(seed, stream)) {}
    double operator()() { return dist_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace shortrate::numerics
