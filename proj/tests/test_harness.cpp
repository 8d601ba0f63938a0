#include <doctest.h>

#include <cmath>

#include "qrng/harness.hpp"

using namespace qrng;

TEST_SUITE("harness") {

TEST_CASE("chi-square: exact agreement gives statistic 0 and p-value 1") {
    const std::array<std::uint64_t, 3> obs{250, 500, 250};
    const std::array<double, 3> probs{0.25, 0.5, 0.25};
    const auto r = chi_square_test(obs, probs);
    CHECK(r.statistic == 0.0);
    CHECK(r.df == 2);
    CHECK(r.p_value == 1.0);
}

TEST_CASE("chi-square: hand-computed statistic and closed-form p-values") {
    // (300-250)^2/250 + (450-500)^2/500 + 0 = 10 + 5 = 15.
    const std::array<std::uint64_t, 3> obs{300, 450, 250};
    const std::array<double, 3> probs{0.25, 0.5, 0.25};
    const auto r = chi_square_test(obs, probs);
    CHECK(std::abs(r.statistic - 15.0) < 1e-12);
    CHECK(r.df == 2);
    // df = 2: survival function is exp(-x/2).
    CHECK(std::abs(r.p_value - std::exp(-7.5)) < 1e-12 * std::exp(-7.5) + 1e-15);

    // df = 1: survival function is erfc(sqrt(x/2)).
    const std::array<std::uint64_t, 2> obs2{600, 400};
    const std::array<double, 2> half{0.5, 0.5};
    const auto r2 = chi_square_test(obs2, half);
    CHECK(std::abs(r2.statistic - 40.0) < 1e-12);
    CHECK(r2.df == 1);
    const double expected = std::erfc(std::sqrt(20.0));
    CHECK(std::abs(r2.p_value - expected) < 1e-10 * expected);
}

TEST_CASE("regularized gamma Q against independent closed forms") {
    // Q(1, x) = exp(-x)  (chi-square with df = 2)
    for (const double x : {0.01, 0.5, 1.0, 3.0, 10.0, 40.0}) {
        CHECK(std::abs(detail::regularized_gamma_q(1.0, x) - std::exp(-x)) <=
              1e-12 * std::exp(-x));
    }
    // Q(1/2, x) = erfc(sqrt(x))  (df = 1)
    for (const double x : {0.01, 0.25, 1.0, 2.0, 8.0}) {
        const double expected = std::erfc(std::sqrt(x));
        CHECK(std::abs(detail::regularized_gamma_q(0.5, x) - expected) <= 1e-11 * expected);
    }
    // Q(4, x) = exp(-x) (1 + x + x^2/2 + x^3/6)  (df = 8)
    for (const double x : {0.5, 2.0, 4.0, 12.0}) {
        const double expected =
            std::exp(-x) * (1.0 + x + x * x / 2.0 + x * x * x / 6.0);
        CHECK(std::abs(detail::regularized_gamma_q(4.0, x) - expected) <= 1e-11 * expected);
    }
}

TEST_CASE("chi-square input validation") {
    const std::array<std::uint64_t, 2> obs{10, 20};
    CHECK_THROWS_AS(chi_square_test(obs, std::array<double, 2>{0.7, 0.7}),
                    std::invalid_argument);

    // Zero-probability category with observations is degenerate ...
    const std::array<std::uint64_t, 3> bad{10, 5, 10};
    CHECK_THROWS_AS(chi_square_test(bad, std::array<double, 3>{0.5, 0.0, 0.5}),
                    DegenerateExpected);

    // ... but with zero observations it contributes nothing.
    const std::array<std::uint64_t, 3> legacy{500, 0, 500};
    const auto r = chi_square_test(legacy, std::array<double, 3>{0.5, 0.0, 0.5});
    CHECK(r.statistic == 0.0);
    CHECK(r.df == 2);

    const std::array<std::uint64_t, 2> tiny{3, 4};
    const std::array<double, 2> half{0.5, 0.5};
    CHECK(chi_square_test(tiny, half).low_expected_count);
    CHECK_FALSE(chi_square_test(std::array<std::uint64_t, 2>{30, 40}, half).low_expected_count);

    CHECK_THROWS_AS(chi_square_test(std::array<std::uint64_t, 2>{0, 0}, half),
                    std::invalid_argument);
}

TEST_CASE("predictor evaluation: vacuous and degenerate predictors") {
    BitStream zeros;
    for (int i = 0; i < 1000; ++i) zeros.bits.push_back(0);

    const auto withheld = evaluate_predictor(predictors::always_withheld(), zeros, 8);
    CHECK(withheld.correct == 0);
    CHECK(withheld.incorrect == 0);
    CHECK(withheld.withheld == 1000);
    CHECK(withheld.k_correct_for == 0);

    const auto zero_on_zeros = evaluate_predictor(predictors::always_zero(), zeros, 8);
    CHECK(zero_on_zeros.correct == 1000);
    CHECK(zero_on_zeros.incorrect == 0);
    CHECK(zero_on_zeros.k_correct_for == 1000);

    BitStream one_error = zeros;
    one_error.bits[500] = 1;
    const auto almost = evaluate_predictor(predictors::always_zero(), one_error, 8);
    CHECK(almost.correct == 999);
    CHECK(almost.incorrect == 1);
    CHECK(almost.k_correct_for == 0);
}

TEST_CASE("predictor evaluation: window extraction") {
    // Record every window the predictor sees and withhold throughout.
    std::vector<std::vector<std::uint8_t>> seen;
    const Predictor recorder = [&seen](std::span<const std::uint8_t> w) {
        seen.emplace_back(w.begin(), w.end());
        return Prediction::withheld;
    };
    const BitStream bits{{1, 0, 1, 1, 0}};
    evaluate_predictor(recorder, bits, 2);
    REQUIRE(seen.size() == 5);
    CHECK(seen[0].empty());
    CHECK(seen[1] == std::vector<std::uint8_t>{1});
    CHECK(seen[2] == std::vector<std::uint8_t>{1, 0});
    CHECK(seen[3] == std::vector<std::uint8_t>{0, 1});
    CHECK(seen[4] == std::vector<std::uint8_t>{1, 1});
}

TEST_CASE("predictor tallies always sum to the stream length") {
    SplitMix64 src(0x7A11);
    for (int trial = 0; trial < 20; ++trial) {
        BitStream bits;
        const std::size_t len = src.next_u64() % 500;
        for (std::size_t i = 0; i < len; ++i)
            bits.bits.push_back(static_cast<std::uint8_t>(src.next_u64() & 1));
        for (const auto& p : {predictors::always_zero(), predictors::always_one(),
                              predictors::always_withheld(), predictors::majority_vote()}) {
            const auto e = evaluate_predictor(p, bits, src.next_u64() % 32);
            CHECK(e.correct + e.incorrect + e.withheld == len);
            if (e.incorrect > 0) CHECK(e.k_correct_for == 0);
        }
    }
}

TEST_CASE("majority predictor follows a biased stream") {
    BitStream ones;
    for (int i = 0; i < 100; ++i) ones.bits.push_back(1);
    const auto e = evaluate_predictor(predictors::majority_vote(), ones, 4);
    // First prediction withheld (empty window), the rest correct.
    CHECK(e.withheld == 1);
    CHECK(e.correct == 99);
    CHECK(e.incorrect == 0);
    CHECK(e.k_correct_for == 99);
}

TEST_CASE("comparison sources are deterministic and distinct") {
    for (const auto& name : known_sources()) {
        const auto a = generate_source_bits(name, 512, 99);
        const auto b = generate_source_bits(name, 512, 99);
        CHECK(a == b);
        const auto c = generate_source_bits(name, 512, 100);
        CHECK(a != c);
    }
    CHECK_THROWS_AS(generate_source_bits("bogus", 16, 1), std::invalid_argument);
}

TEST_CASE("comparison battery applies identical parameters per source") {
    const auto report = compare_sources({"qrng", "lcg64"}, 1 << 16, 1234,
                                        AccuracyFunction::sqrt_log());
    REQUIRE(report.rows.size() == 2);
    for (const auto& row : report.rows) {
        CHECK(row.ok);
        CHECK(row.normality.n == (1 << 16));
        CHECK(row.normality.per_m.size() == 4);  // same m range for both
        CHECK(row.throughput_bits_per_s > 0.0);
    }

    const auto single = compare_sources({"xorshift64"}, 4096, 7, AccuracyFunction::inv_log());
    CHECK(single.rows.size() == 1);

    // A bad source is isolated; the run continues.
    const auto mixed = compare_sources({"qrng", "bogus"}, 4096, 7,
                                       AccuracyFunction::sqrt_log());
    REQUIRE(mixed.rows.size() == 2);
    CHECK(mixed.rows[0].ok);
    CHECK_FALSE(mixed.rows[1].ok);
    CHECK(!mixed.rows[1].error.empty());

    const auto j = comparison_to_json(mixed);
    CHECK(j.at("sources").size() == 2);
    CHECK(j.at("sources").at(0).at("ok") == true);
    CHECK(j.at("sources").at(0).contains("chi_square"));
    CHECK(j.at("sources").at(0).contains("normality"));
    CHECK(j.at("sources").at(1).at("ok") == false);

    CHECK_THROWS_AS(compare_sources({}, 16, 1, AccuracyFunction::sqrt_log()),
                    std::invalid_argument);
}

}  // TEST_SUITE
