#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "cbo/core.hpp"

namespace cbo {

/// SplitMix64 output finalizer (a bijection on 64-bit words).
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of stream `index` under `master`:
///
///     splitmix64(master + 0x9E3779B97F4A7C15 * (index + 1))   (mod 2^64)
///
/// Distinct indices give distinct seeds for a fixed master because both the
/// affine step and the finalizer are injective.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(master + 0x9E3779B97F4A7C15ULL * (index + 1));
}

/// One reproducible stream of uniforms and standard normals.
///
/// Engine: std::mt19937_64 seeded with derive_seed(master_seed, stream_index).
/// Normals come from std::normal_distribution, so sequences are reproducible
/// within one standard library build, not across toolchains.
class RngStream {
public:
    static constexpr std::string_view algorithm = "mt19937_64+splitmix64";

    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : master_seed_(master_seed),
          stream_index_(stream_index),
          engine_(derive_seed(master_seed, stream_index)) {}

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }

    double normal() { return normal_(engine_); }
    double uniform(double low, double high) {
        return std::uniform_real_distribution<double>(low, high)(engine_);
    }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

/// Normals for one step. Common mode: d values, one per dimension, shared by
/// all particles. Independent mode: N*d values, particle-major.
std::vector<double> draw_step_noise(RngStream& rng, const Params& p);

}  // namespace cbo
