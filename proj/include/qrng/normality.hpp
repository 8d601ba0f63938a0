#pragma once

// Finite Borel-normality analysis over bit streams.
//
// A length-n string is tested block size by block size: for each m in
// 1..floor(log2 log2 n), split into floor(n/m) consecutive non-overlapping
// m-blocks (trailing remainder discarded) and require every m-bit pattern's
// frequency to stay within eps of 2^-m (inclusive comparison). eps comes
// from an accuracy function evaluated at the analyzed string's own length.
//
// Block patterns are keyed as integers in [0, 2^m) with the leftmost stream
// bit most significant; reports render keys as bit strings.
//
// Counting is single-pass and constant-memory in n for fixed m, and block
// counters over streams cut at block boundaries merge by addition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrng/coding.hpp"
#include "qrng/entropy.hpp"
#include "qrng/measurement_sim.hpp"

namespace qrng {

struct StringTooShort : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct EmptyBlocks : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct TooLarge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline std::array<std::uint64_t, 2> count_symbols(const BitStream& x) {
    std::array<std::uint64_t, 2> n{};
    for (const auto b : x.bits) ++n[b];
    return n;
}

struct BlockCounts {
    unsigned m = 1;
    std::uint64_t total_blocks = 0;
    std::vector<std::uint64_t> counts;  // indexed by pattern, size 2^m
};

inline BlockCounts block_counts(const BitStream& x, unsigned m) {
    if (m == 0) throw std::invalid_argument("block_counts: m must be >= 1");
    if (m > 30) throw TooLarge("block_counts: m > 30");
    BlockCounts bc;
    bc.m = m;
    bc.total_blocks = x.size() / m;
    bc.counts.assign(std::uint64_t{1} << m, 0);
    const std::uint8_t* bits = x.bits.data();
    for (std::uint64_t blk = 0; blk < bc.total_blocks; ++blk) {
        std::uint64_t key = 0;
        for (unsigned k = 0; k < m; ++k) key = (key << 1) | bits[blk * m + k];
        ++bc.counts[key];
    }
    return bc;
}

// Counter monoid: valid when both sides were counted at the same m and the
// left stream's length is a multiple of m.
inline BlockCounts merge(const BlockCounts& a, const BlockCounts& b) {
    if (a.m != b.m) throw std::invalid_argument("merge: mismatched block lengths");
    BlockCounts out = a;
    out.total_blocks += b.total_blocks;
    for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] += b.counts[i];
    return out;
}

struct AccuracyFunction {
    enum class Kind { sqrt_log, inv_log, constant };
    Kind kind = Kind::sqrt_log;
    double constant = 0.0;

    static AccuracyFunction sqrt_log() { return {Kind::sqrt_log, 0.0}; }
    static AccuracyFunction inv_log() { return {Kind::inv_log, 0.0}; }
    static AccuracyFunction fixed(double eps) { return {Kind::constant, eps}; }

    double operator()(std::uint64_t n) const {
        switch (kind) {
            case Kind::sqrt_log: {
                const double nn = static_cast<double>(n);
                return std::sqrt(std::log2(nn) / nn);
            }
            case Kind::inv_log: return 1.0 / std::log2(static_cast<double>(n));
            case Kind::constant: return constant;
        }
        throw std::logic_error("AccuracyFunction: bad kind");
    }

    std::string name() const {
        switch (kind) {
            case Kind::sqrt_log: return "sqrtlog";
            case Kind::inv_log: return "invlog";
            case Kind::constant: return "const:" + std::to_string(constant);
        }
        throw std::logic_error("AccuracyFunction: bad kind");
    }

    // Accepts "sqrtlog", "invlog", or "const:<float>".
    static std::optional<AccuracyFunction> parse(const std::string& s) {
        if (s == "sqrtlog") return sqrt_log();
        if (s == "invlog") return inv_log();
        if (s.rfind("const:", 0) == 0) {
            try {
                return fixed(std::stod(s.substr(6)));
            } catch (const std::exception&) {
                return std::nullopt;
            }
        }
        return std::nullopt;
    }
};

struct BlockDeviation {
    bool pass = false;
    double max_deviation = 0.0;
    std::uint64_t worst_block = 0;
};

// The per-block-size test: every pattern frequency within eps of 2^-m.
inline BlockDeviation is_normal_with_accuracy(const BitStream& x, unsigned m, double eps) {
    if (m == 0) throw std::invalid_argument("is_normal_with_accuracy: m must be >= 1");
    if (x.size() / m == 0) throw EmptyBlocks("is_normal_with_accuracy: no complete block");
    const BlockCounts bc = block_counts(x, m);
    const double expected = std::ldexp(1.0, -static_cast<int>(m));  // 2^-m
    const double total = static_cast<double>(bc.total_blocks);
    BlockDeviation dev;
    for (std::uint64_t u = 0; u < bc.counts.size(); ++u) {
        const double d = std::abs(static_cast<double>(bc.counts[u]) / total - expected);
        if (d > dev.max_deviation) {
            dev.max_deviation = d;
            dev.worst_block = u;
        }
    }
    dev.pass = dev.max_deviation <= eps;
    return dev;
}

// floor(log2 log2 n): the largest m >= 1 with 2^(2^m) <= n. 0 when n < 4.
inline unsigned max_block_length(std::uint64_t n) {
    unsigned m = 0;
    // 2^(2^(m+1)) = (2^(2^m))^2; stop once the threshold exceeds n.
    std::uint64_t threshold = 4;  // 2^(2^1)
    while (threshold <= n) {
        ++m;
        if (threshold > 0xFFFFFFFFull) break;  // squaring would overflow; m = 6 needs n >= 2^64
        threshold *= threshold;
    }
    return m;
}

inline std::string block_to_string(std::uint64_t key, unsigned m) {
    std::string s(m, '0');
    for (unsigned k = 0; k < m; ++k)
        if ((key >> (m - 1 - k)) & 1u) s[k] = '1';
    return s;
}

struct NormalityReport {
    struct PerM {
        unsigned m = 0;
        double epsilon = 0.0;
        double max_deviation = 0.0;
        std::string worst_block;
        bool pass = false;
    };
    std::uint64_t n = 0;
    std::string accuracy;
    std::vector<PerM> per_m;
    bool pass = false;
};

inline NormalityReport normality_report(const BitStream& x, const AccuracyFunction& acc) {
    const std::uint64_t n = x.size();
    if (n < 4) throw StringTooShort("normality_report: need at least 4 bits");
    NormalityReport report;
    report.n = n;
    report.accuracy = acc.name();
    report.pass = true;
    const double eps = acc(n);
    const unsigned m_max = max_block_length(n);
    for (unsigned m = 1; m <= m_max; ++m) {
        const BlockDeviation dev = is_normal_with_accuracy(x, m, eps);
        report.per_m.push_back({m, eps, dev.max_deviation,
                                block_to_string(dev.worst_block, m), dev.pass});
        report.pass = report.pass && dev.pass;
    }
    return report;
}

// {"n": ..., "accuracy": "...", "per_m": [{"m": ..., "epsilon": ...,
//  "max_deviation": ..., "worst_block": "...", "pass": ...}], "pass": ...}
inline nlohmann::ordered_json report_to_json(const NormalityReport& r) {
    nlohmann::ordered_json per_m = nlohmann::json::array();
    for (const auto& e : r.per_m) {
        per_m.push_back({{"m", e.m},
                         {"epsilon", e.epsilon},
                         {"max_deviation", e.max_deviation},
                         {"worst_block", e.worst_block},
                         {"pass", e.pass}});
    }
    return nlohmann::ordered_json{
        {"n", r.n}, {"accuracy", r.accuracy}, {"per_m", per_m}, {"pass", r.pass}};
}

// Brute-force oracle: enumerate all 2^m strings of length m and count the
// ones that fail the full report under acc.
inline std::uint64_t count_nonnormal_exhaustive(unsigned m, const AccuracyFunction& acc) {
    if (m > 24) throw TooLarge("count_nonnormal_exhaustive: m > 24");
    if (m < 4) throw StringTooShort("count_nonnormal_exhaustive: m < 4");
    std::uint64_t failures = 0;
    BitStream x;
    x.bits.resize(m);
    const std::uint64_t limit = std::uint64_t{1} << m;
    for (std::uint64_t v = 0; v < limit; ++v) {
        for (unsigned k = 0; k < m; ++k) x.bits[k] = (v >> (m - 1 - k)) & 1u;
        if (!normality_report(x, acc).pass) ++failures;
    }
    return failures;
}

// Monte Carlo estimate of how often a pipeline string of length m passes the
// sqrt-log battery: generate ternary, apply the morphism, test the prefix.
template <UniformSource S>
double estimate_normal_probability(unsigned m, unsigned trials, S& entropy) {
    if (trials == 0) throw std::invalid_argument("estimate_normal_probability: trials >= 1");
    const AccuracyFunction acc = AccuracyFunction::sqrt_log();
    unsigned passed = 0;
    for (unsigned t = 0; t < trials; ++t) {
        const auto gen = generate_ternary(Preparation::plus_one, m, entropy);
        const BitStream y = morphism_stream(gen.stream);
        if (normality_report(y, acc).pass) ++passed;
    }
    return static_cast<double>(passed) / static_cast<double>(trials);
}

}  // namespace qrng
