#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace spectra_lab {

/// SplitMix64 (Steele, Lea, Flood). Used to expand seeds and derive sub-seeds.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}
    std::uint64_t next() noexcept;

private:
    std::uint64_t state_;
};

/// Finalizer of SplitMix64 applied to a single word.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Sub-seed for independent stream `stream` of a run seeded with `seed`:
/// mix64(seed ^ mix64(stream + 0x9E3779B97F4A7C15)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// xoshiro256** 1.0 (Blackman, Vigna), state filled by four SplitMix64 draws.
/// Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on [0, 1) with 53 random bits: (x >> 11) * 2^-53.
    double uniform() noexcept;

private:
    std::array<std::uint64_t, 4> s_;
};

/// Standard normal variates by the Marsaglia polar method. Draws pairs; the
/// second value of each pair is returned on the next call.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) noexcept : gen_(seed) {}

    double next() noexcept;
    /// Exponential variate with unit mean: -ln(1 - U).
    double exponential() noexcept;

private:
    Xoshiro256 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace spectra_lab
