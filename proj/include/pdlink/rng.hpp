#pragma once

#include <cstdint>
#include <random>

#include "pdlink/waveform.hpp"

namespace pdlink {

// splitmix64 finalizer over (master, stream). Every consumer of randomness
// owns a stream index, so runs are reproducible regardless of evaluation
// order and sweep points stay decorrelated.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (stream + 1ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t stream) {
    return std::mt19937_64(mix_seed(master, stream));
}

// Stream indices used by the link harness.
namespace stream {
constexpr std::uint64_t bits = 0x10;      // + band index
constexpr std::uint64_t scramble = 0x20;  // + band index
constexpr std::uint64_t laser = 0x30;
constexpr std::uint64_t drive_awgn = 0x40;
constexpr std::uint64_t optical_awgn = 0x48;
constexpr std::uint64_t pd = 0x50;        // + branch index
constexpr std::uint64_t baseline_noise = 0x60;
constexpr std::uint64_t sweep_point = 0x70;  // + grid index
}  // namespace stream

// Adds circular complex Gaussian noise with total variance var_total.
inline void add_cgauss(std::vector<cplx>& x, double var_total, std::mt19937_64& rng) {
    if (var_total <= 0.0) return;
    std::normal_distribution<double> n(0.0, std::sqrt(var_total / 2.0));
    for (auto& v : x) v += cplx(n(rng), n(rng));
}

}  // namespace pdlink
