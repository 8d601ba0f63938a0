#pragma once

// Seedable deterministic entropy sources. The default source drives the
// measurement simulator; the LCG and xorshift engines exist as comparison
// generators for the analysis harness. All three expose the same minimal
// surface: next_u64(), next_uniform() in [0,1), reseed().
//
// Same seed, same sequence — reproducibility is part of the contract.

#include <concepts>
#include <cstdint>

namespace qrng {

template <typename S>
concept UniformSource = requires(S s) {
    { s.next_uniform() } -> std::convertible_to<double>;
};

namespace detail {
// 53-bit mantissa fill, result in [0, 1).
inline double u64_to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}
}  // namespace detail

// Counter-based generator: the state is a Weyl counter advanced by a fixed
// odd increment and the output is a bijective mix of it (splitmix64 finalizer).
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    constexpr std::uint64_t next_u64() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double next_uniform() noexcept { return detail::u64_to_unit(next_u64()); }

    constexpr void reseed(std::uint64_t seed) noexcept { state_ = seed; }

private:
    std::uint64_t state_;
};

// Knuth MMIX linear congruential generator. Low bits of an LCG are weak, so
// uniforms are taken from the high 53 bits of the state.
class Lcg64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr Lcg64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    constexpr std::uint64_t next_u64() noexcept {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }

    double next_uniform() noexcept { return detail::u64_to_unit(next_u64()); }

    constexpr void reseed(std::uint64_t seed) noexcept { state_ = seed; }

private:
    std::uint64_t state_;
};

// Marsaglia xorshift64, the shift-register-class comparison generator.
class Xorshift64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr Xorshift64(std::uint64_t seed = 0) noexcept { reseed(seed); }

    constexpr std::uint64_t next_u64() noexcept {
        std::uint64_t x = state_;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        state_ = x;
        return x;
    }

    double next_uniform() noexcept { return detail::u64_to_unit(next_u64()); }

    // All-zero state is a fixed point; remap it.
    constexpr void reseed(std::uint64_t seed) noexcept {
        state_ = seed != 0 ? seed : 0x9E3779B97F4A7C15ULL;
    }

private:
    std::uint64_t state_;
};

static_assert(UniformSource<SplitMix64>);
static_assert(UniformSource<Lcg64>);
static_assert(UniformSource<Xorshift64>);

}  // namespace qrng
