#pragma once

// Statistical harness: Pearson chi-square with a high-precision p-value,
// predictor evaluation over bit streams, and the multi-source comparison
// battery used by the CLI.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrng/coding.hpp"
#include "qrng/entropy.hpp"
#include "qrng/measurement_sim.hpp"
#include "qrng/normality.hpp"

namespace qrng {

struct DegenerateExpected : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

// Regularized upper incomplete gamma Q(a, x): series for x < a+1, Lentz
// continued fraction otherwise. Relative accuracy ~1e-14 over the chi-square
// range used here (a = df/2 with df <= 8).
inline double regularized_gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("regularized_gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by series, Q = 1 - P.
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-17) break;
        }
        return 1.0 - sum * std::exp(log_prefactor);
    }
    // Q(a,x) by continued fraction (modified Lentz).
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(log_prefactor) * h;
}

}  // namespace detail

struct ChiSquareResult {
    double statistic = 0.0;
    unsigned df = 0;
    double p_value = 1.0;
    bool low_expected_count = false;  // some expected count < 5: p-value approximate
};

// Pearson chi-square of observed counts against expected probabilities.
// Zero-probability categories must have zero observations; they contribute
// nothing to the statistic and df stays categories - 1.
inline ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed,
                                       std::span<const double> expected_probs) {
    if (observed.size() != expected_probs.size() || observed.size() < 2)
        throw std::invalid_argument("chi_square_test: need >= 2 matching categories");
    double prob_sum = 0.0;
    for (const double p : expected_probs) {
        if (p < 0.0) throw std::invalid_argument("chi_square_test: negative probability");
        prob_sum += p;
    }
    if (std::abs(prob_sum - 1.0) > 1e-9)
        throw std::invalid_argument("chi_square_test: probabilities must sum to 1");

    std::uint64_t total = 0;
    for (const auto o : observed) total += o;
    if (total == 0) throw std::invalid_argument("chi_square_test: no observations");

    ChiSquareResult result;
    result.df = static_cast<unsigned>(observed.size() - 1);
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expected = static_cast<double>(total) * expected_probs[i];
        if (expected_probs[i] == 0.0) {
            if (observed[i] != 0)
                throw DegenerateExpected(
                    "chi_square_test: observations in a zero-probability category");
            continue;
        }
        if (expected < 5.0) result.low_expected_count = true;
        const double diff = static_cast<double>(observed[i]) - expected;
        result.statistic += diff * diff / expected;
    }
    result.p_value =
        detail::regularized_gamma_q(static_cast<double>(result.df) / 2.0, result.statistic / 2.0);
    return result;
}

// --- predictor evaluation ----------------------------------------------------

enum class Prediction : std::uint8_t { zero, one, withheld };

// A predictor is total by construction: any callable mapping the extracted
// window (the bits preceding the current position) to a prediction.
using Predictor = std::function<Prediction(std::span<const std::uint8_t>)>;

namespace predictors {

inline Predictor always_zero() {
    return [](std::span<const std::uint8_t>) { return Prediction::zero; };
}
inline Predictor always_one() {
    return [](std::span<const std::uint8_t>) { return Prediction::one; };
}
inline Predictor always_withheld() {
    return [](std::span<const std::uint8_t>) { return Prediction::withheld; };
}
// Majority vote over the window; withholds on empty window or tie.
inline Predictor majority_vote() {
    return [](std::span<const std::uint8_t> window) {
        std::uint64_t ones = 0;
        for (const auto b : window) ones += b;
        if (2 * ones > window.size()) return Prediction::one;
        if (2 * ones < window.size()) return Prediction::zero;
        return Prediction::withheld;
    };
}

}  // namespace predictors

struct PredictorEvaluation {
    std::uint64_t correct = 0;
    std::uint64_t incorrect = 0;
    std::uint64_t withheld = 0;
    // Largest k with k correct predictions and none incorrect in this run;
    // any incorrect prediction forces 0.
    std::uint64_t k_correct_for = 0;
};

inline PredictorEvaluation evaluate_predictor(const Predictor& predict, const BitStream& bits,
                                              std::size_t window) {
    PredictorEvaluation eval;
    const std::uint8_t* data = bits.bits.data();
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const std::size_t lo = i > window ? i - window : 0;
        const Prediction p = predict({data + lo, i - lo});
        if (p == Prediction::withheld) {
            ++eval.withheld;
        } else if ((p == Prediction::one) == (bits[i] == 1)) {
            ++eval.correct;
        } else {
            ++eval.incorrect;
        }
    }
    eval.k_correct_for = eval.incorrect == 0 ? eval.correct : 0;
    return eval;
}

inline nlohmann::ordered_json evaluation_to_json(const std::string& name,
                                                 const PredictorEvaluation& e) {
    return nlohmann::ordered_json{{"predictor", name},
                                  {"correct", e.correct},
                                  {"incorrect", e.incorrect},
                                  {"withheld", e.withheld},
                                  {"k_correct_for", e.k_correct_for}};
}

// --- comparison battery ------------------------------------------------------

// Bit sources for the comparison harness. "qrng" is the simulated pipeline
// (ternary Born sampling followed by the morphism); the PRNG sources
// threshold their uniforms. One uniform draw per bit for every source.
inline const std::vector<std::string>& known_sources() {
    static const std::vector<std::string> names{"qrng", "lcg64", "xorshift64"};
    return names;
}

inline BitStream generate_source_bits(const std::string& name, std::uint64_t n,
                                      std::uint64_t seed) {
    BitStream out;
    out.bits.reserve(n);
    if (name == "qrng") {
        SplitMix64 src(seed);
        const OutcomeDistribution dist = outcome_distribution(Preparation::plus_one);
        for (std::uint64_t i = 0; i < n; ++i)
            out.bits.push_back(morphism_digit(sample_digit(dist, src)));
        return out;
    }
    auto fill = [&out, n](auto engine) {
        for (std::uint64_t i = 0; i < n; ++i)
            out.bits.push_back(engine.next_uniform() < 0.5 ? 0 : 1);
    };
    if (name == "lcg64") {
        fill(Lcg64(seed));
    } else if (name == "xorshift64") {
        fill(Xorshift64(seed));
    } else {
        throw std::invalid_argument("unknown source: " + name);
    }
    return out;
}

struct SourceReport {
    std::string source;
    bool ok = false;
    std::string error;
    ChiSquareResult chi_square;
    NormalityReport normality;
    double throughput_bits_per_s = 0.0;
};

struct ComparisonReport {
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::string accuracy;
    std::vector<SourceReport> rows;
};

// Identical battery per source: chi-square on symbol counts against the
// uniform distribution, plus the full normality report. Per-source failures
// land in the row, they do not abort the run.
inline ComparisonReport compare_sources(const std::vector<std::string>& sources,
                                        std::uint64_t n, std::uint64_t seed,
                                        const AccuracyFunction& acc) {
    if (sources.empty()) throw std::invalid_argument("compare_sources: need >= 1 source");
    ComparisonReport report;
    report.n = n;
    report.seed = seed;
    report.accuracy = acc.name();
    for (const auto& name : sources) {
        SourceReport row;
        row.source = name;
        try {
            const auto t0 = std::chrono::steady_clock::now();
            const BitStream bits = generate_source_bits(name, n, seed);
            const auto t1 = std::chrono::steady_clock::now();
            const double secs = std::chrono::duration<double>(t1 - t0).count();
            row.throughput_bits_per_s = secs > 0.0 ? static_cast<double>(n) / secs : 0.0;

            const auto counts = count_symbols(bits);
            const std::array<double, 2> uniform{0.5, 0.5};
            row.chi_square = chi_square_test(counts, uniform);
            row.normality = normality_report(bits, acc);
            row.ok = true;
        } catch (const std::exception& ex) {
            row.ok = false;
            row.error = ex.what();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline nlohmann::ordered_json comparison_to_json(const ComparisonReport& report) {
    nlohmann::ordered_json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json j{{"source", row.source},
                                 {"n", report.n},
                                 {"seed", report.seed},
                                 {"accuracy", report.accuracy},
                                 {"ok", row.ok}};
        if (row.ok) {
            j["chi_square"] = {{"statistic", row.chi_square.statistic},
                               {"df", row.chi_square.df},
                               {"p_value", row.chi_square.p_value}};
            j["normality"] = report_to_json(row.normality);
            j["throughput_bits_per_s"] = row.throughput_bits_per_s;
        } else {
            j["error"] = row.error;
        }
        rows.push_back(std::move(j));
    }
    return nlohmann::ordered_json{{"n", report.n},
                                  {"seed", report.seed},
                                  {"accuracy", report.accuracy},
                                  {"sources", rows}};
}

}  // namespace qrng
