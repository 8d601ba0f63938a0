#pragma once

// The "preparation, measurement, reset" loop: prepare one of the sanctioned
// states, take its S_x outcome distribution, and sample ternary digits.
//
// Digit mapping (fixed): S_x = +1 -> digit 0, S_x = 0 -> digit 1,
// S_x = -1 -> digit 2, so digit 1 is the probability-1/2 outcome and the
// morphism's binary image is uniform.
//
// A classical seeded entropy source reproduces the outcome distribution but
// not value indefiniteness: this simulates the pipeline, it does not certify
// the randomness. GenerationRecords carry that note.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qrng/coding.hpp"
#include "qrng/entropy.hpp"
#include "qrng/spin_algebra.hpp"

namespace qrng {

enum class Preparation { plus_one, minus_one, superposition, legacy_sz_zero };

inline const char* to_string(Preparation p) {
    switch (p) {
        case Preparation::plus_one: return "plus1";
        case Preparation::minus_one: return "minus1";
        case Preparation::superposition: return "superposition";
        case Preparation::legacy_sz_zero: return "legacy";
    }
    throw std::invalid_argument("to_string: bad Preparation");
}

inline std::optional<Preparation> preparation_from_string(std::string_view s) {
    if (s == "plus1") return Preparation::plus_one;
    if (s == "minus1") return Preparation::minus_one;
    if (s == "superposition") return Preparation::superposition;
    if (s == "legacy") return Preparation::legacy_sz_zero;
    return std::nullopt;
}

inline StateVector prepare(Preparation spec) {
    switch (spec) {
        case Preparation::plus_one: return {1.0, 0.0, 0.0};
        case Preparation::minus_one: return {0.0, 0.0, 1.0};
        case Preparation::superposition: {
            // (|+> - |->)/sqrt(2) with |+-> = (|0> +- |1>)/sqrt(2).
            const StateVector ket_plus{kInvSqrt2, kInvSqrt2, 0.0};
            const StateVector ket_minus{-kInvSqrt2, kInvSqrt2, 0.0};
            return cplx{kInvSqrt2, 0.0} * (ket_plus - ket_minus);
        }
        case Preparation::legacy_sz_zero: return {0.0, 1.0, 0.0};
    }
    throw std::invalid_argument("prepare: bad Preparation");
}

// p[d] for digits d in {0, 1, 2}.
struct OutcomeDistribution {
    std::array<double, 3> p{};
};

inline OutcomeDistribution outcome_distribution(Preparation spec) {
    const auto probs = born_probabilities(prepare(spec), eigensystem_sx_analytic());
    return OutcomeDistribution{probs};
}

// Inverse-CDF sampling; consumes exactly one uniform draw. Half-open
// intervals [0, p0), [p0, p0+p1), [p0+p1, 1): a zero-probability digit can
// never be produced.
template <UniformSource S>
std::uint8_t sample_digit(const OutcomeDistribution& dist, S& entropy) {
    const double u = entropy.next_uniform();
    double cum = 0.0;
    for (std::uint8_t d = 0; d < 2; ++d) {
        cum += dist.p[d];
        if (u < cum) return d;
    }
    return 2;
}

struct GenerationRecord {
    std::uint64_t seed = 0;
    Preparation preparation = Preparation::plus_one;
    std::uint64_t count = 0;
    std::array<std::uint64_t, 3> tallies{};
};

inline constexpr const char* kSimulationNote =
    "classically simulated outcome distribution; reproduces the statistics, "
    "not a value-indefiniteness certificate";

// {"seed": ..., "preparation": "...", "count": n, "tallies": [n0, n1, n2]}
inline nlohmann::ordered_json record_to_json(const GenerationRecord& rec) {
    return nlohmann::ordered_json{{"seed", rec.seed},
                                  {"preparation", to_string(rec.preparation)},
                                  {"count", rec.count},
                                  {"tallies", rec.tallies},
                                  {"note", kSimulationNote}};
}

struct GenerationResult {
    TernaryStream stream;
    GenerationRecord record;
};

template <UniformSource S>
GenerationResult generate_ternary(Preparation spec, std::uint64_t count, S& entropy,
                                  std::uint64_t recorded_seed = 0) {
    const OutcomeDistribution dist = outcome_distribution(spec);
    GenerationResult result;
    result.record.seed = recorded_seed;
    result.record.preparation = spec;
    result.record.count = count;
    result.stream.digits.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint8_t d = sample_digit(dist, entropy);
        result.stream.digits.push_back(d);
        ++result.record.tallies[d];
    }
    return result;
}

// Pure function of (spec, count, seed).
inline GenerationResult generate_ternary(Preparation spec, std::uint64_t count,
                                         std::uint64_t seed) {
    SplitMix64 entropy(seed);
    return generate_ternary(spec, count, entropy, seed);
}

}  // namespace qrng
