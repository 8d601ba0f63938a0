// qrng: simulate the spin-1 ternary QRNG pipeline and analyze its output.
//
// Subcommands: generate, transform, analyze, compare, decompose,
// verify-physics. Machine-readable JSON goes to stdout (or --out), human
// summaries go to stderr.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrng/coding.hpp"
#include "qrng/entropy.hpp"
#include "qrng/harness.hpp"
#include "qrng/measurement_sim.hpp"
#include "qrng/normality.hpp"
#include "qrng/spin_algebra.hpp"
#include "qrng/unitary_decomp.hpp"

namespace {

using nlohmann::ordered_json;

void emit(const ordered_json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump() << "\n";
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw qrng::IoError("cannot open for writing: " + out_path);
        out << j.dump(2) << "\n";
    }
}

qrng::AccuracyFunction parse_accuracy_or_throw(const std::string& s) {
    const auto acc = qrng::AccuracyFunction::parse(s);
    if (!acc)
        throw CLI::ValidationError("--accuracy",
                                   "expected sqrtlog, invlog, or const:<float>, got " + s);
    return *acc;
}

constexpr std::size_t kChunk = 1 << 20;

int cmd_generate(const std::string& prep_name, std::uint64_t seed, std::uint64_t count,
                 const std::string& out_path) {
    const auto prep = qrng::preparation_from_string(prep_name);
    if (!prep) throw CLI::ValidationError("--prep", "unknown preparation: " + prep_name);

    const auto dist = qrng::outcome_distribution(*prep);
    qrng::SplitMix64 entropy(seed);
    qrng::GenerationRecord record;
    record.seed = seed;
    record.preparation = *prep;
    record.count = count;

    qrng::TernaryFileWriter writer(out_path, count);
    std::vector<std::uint8_t> chunk;
    chunk.reserve(kChunk);
    std::uint64_t remaining = count;
    while (remaining > 0) {
        const std::size_t n = static_cast<std::size_t>(
            std::min<std::uint64_t>(kChunk, remaining));
        chunk.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint8_t d = qrng::sample_digit(dist, entropy);
            chunk.push_back(d);
            ++record.tallies[d];
        }
        writer.append(chunk);
        remaining -= n;
    }
    writer.finish();

    const auto j = qrng::record_to_json(record);
    emit(j, "");
    std::ofstream sidecar(out_path + ".json", std::ios::trunc);
    if (!sidecar) throw qrng::IoError("cannot write sidecar: " + out_path + ".json");
    sidecar << j.dump(2) << "\n";

    std::cerr << "generated " << count << " ternary digits (prep " << prep_name << ", seed "
              << seed << ") -> " << out_path << "\n"
              << "tallies: " << record.tallies[0] << " / " << record.tallies[1] << " / "
              << record.tallies[2] << "\n";
    return 0;
}

int cmd_transform(const std::string& in_path, const std::string& out_path) {
    namespace fs = std::filesystem;
    if (fs::exists(out_path) && fs::exists(in_path) && fs::equivalent(in_path, out_path))
        throw qrng::IoError("transform: input and output are the same file");
    qrng::TernaryFileReader reader(in_path);
    qrng::BitFileWriter writer(out_path, reader.count());

    std::vector<std::uint8_t> digits(kChunk);
    std::vector<std::uint8_t> bits(kChunk);
    std::uint64_t processed = 0;
    while (true) {
        const std::size_t got = reader.read(digits);
        if (got == 0) break;
        for (std::size_t i = 0; i < got; ++i) bits[i] = qrng::morphism_digit(digits[i]);
        writer.append({bits.data(), got});
        processed += got;
    }
    writer.finish();

    emit(ordered_json{{"input", in_path}, {"output", out_path}, {"count", processed}}, "");
    std::cerr << "transformed " << processed << " digits -> " << out_path << "\n";
    return 0;
}

int cmd_analyze(const std::string& in_path, const std::string& accuracy_name,
                std::uint32_t window, bool run_predictors, const std::string& out_path) {
    const auto acc = parse_accuracy_or_throw(accuracy_name);
    const qrng::BitStream bits = qrng::read_bit_file(in_path);

    const auto report = qrng::normality_report(bits, acc);
    const auto counts = qrng::count_symbols(bits);
    const std::array<double, 2> uniform{0.5, 0.5};
    const auto chi = qrng::chi_square_test(counts, uniform);

    ordered_json j{{"file", in_path},
                   {"n", bits.size()},
                   {"counts", counts},
                   {"chi_square",
                    {{"statistic", chi.statistic}, {"df", chi.df}, {"p_value", chi.p_value}}},
                   {"normality", qrng::report_to_json(report)}};

    if (run_predictors) {
        ordered_json evals = ordered_json::array();
        const std::pair<const char*, qrng::Predictor> battery[] = {
            {"always_zero", qrng::predictors::always_zero()},
            {"always_one", qrng::predictors::always_one()},
            {"always_withheld", qrng::predictors::always_withheld()},
            {"majority_vote", qrng::predictors::majority_vote()},
        };
        for (const auto& [name, predictor] : battery)
            evals.push_back(qrng::evaluation_to_json(
                name, qrng::evaluate_predictor(predictor, bits, window)));
        j["window"] = window;
        j["predictors"] = evals;
    }

    emit(j, out_path);
    if (chi.low_expected_count)
        std::cerr << "warning: expected counts below 5, chi-square p-value is approximate\n";
    std::cerr << "analyzed " << bits.size() << " bits: normality "
              << (report.pass ? "pass" : "FAIL") << ", chi-square p = " << chi.p_value << "\n";
    return 0;
}

int cmd_compare(const std::vector<std::string>& sources, std::uint64_t count,
                std::uint64_t seed, const std::string& accuracy_name,
                const std::string& out_path) {
    const auto acc = parse_accuracy_or_throw(accuracy_name);
    const auto report = qrng::compare_sources(sources, count, seed, acc);
    emit(qrng::comparison_to_json(report), out_path);
    for (const auto& row : report.rows) {
        if (row.ok) {
            std::cerr << row.source << ": chi2 p = " << row.chi_square.p_value
                      << ", normality " << (row.normality.pass ? "pass" : "FAIL") << ", "
                      << row.throughput_bits_per_s / 1e6 << " Mbit/s\n";
        } else {
            std::cerr << row.source << ": ERROR " << row.error << "\n";
        }
    }
    return 0;
}

int cmd_decompose(const std::string& matrix_path, const std::string& plan_path,
                  const std::string& out_path) {
    if (!plan_path.empty()) {
        // Reconstruct mode: plan JSON in, matrix JSON out.
        std::ifstream in(plan_path);
        if (!in) throw qrng::IoError("cannot open for reading: " + plan_path);
        const auto plan = qrng::plan_from_json(nlohmann::json::parse(in));
        const qrng::Mat3 u = qrng::reconstruct(plan);
        emit(qrng::matrix_to_json(u), out_path);
        std::cerr << "reconstructed " << plan.layers.size() << "-layer plan, unitarity error "
                  << qrng::max_abs_diff(u.adjoint() * u, qrng::Mat3::identity()) << "\n";
        return 0;
    }

    qrng::Mat3 u;
    if (matrix_path.empty()) {
        u = qrng::build_ux();
        std::cerr << "no input matrix given: decomposing the built-in U_x\n";
    } else {
        std::ifstream in(matrix_path);
        if (!in) throw qrng::IoError("cannot open for reading: " + matrix_path);
        u = qrng::matrix_from_json(nlohmann::json::parse(in));
    }
    const auto plan = qrng::decompose(u);
    emit(qrng::plan_to_json(plan), out_path);
    std::cerr << "decomposed into " << plan.layers.size() << " layers, reconstruction error "
              << qrng::max_abs_diff(qrng::reconstruct(plan), u) << "\n";
    return 0;
}

struct Check {
    std::string name;
    bool pass;
};

int cmd_verify_physics(const std::string& out_path) {
    using namespace qrng;
    std::vector<Check> checks;
    auto run = [&checks](const std::string& name, auto&& fn) {
        bool ok = false;
        try {
            ok = fn();
        } catch (const std::exception& ex) {
            std::cerr << name << " threw: " << ex.what() << "\n";
        }
        checks.push_back({name, ok});
        std::cerr << (ok ? "ok   " : "FAIL ") << name << "\n";
    };

    run("spin-operator-identities", [] {
        const auto ops = make_spin_operators();
        return max_abs_diff(ops.sigma_x, cplx{0.5, 0.0} * (ops.s_plus + ops.s_minus)) < 1e-15 &&
               is_hermitian(ops.sigma_x, 1e-15) && is_hermitian(ops.sigma_y, 1e-15) &&
               is_hermitian(ops.sigma_z, 1e-15) &&
               max_abs_diff(ops.s_plus.adjoint(), ops.s_minus) < 1e-15 &&
               max_abs_diff(spin_observable(0.0, 0.0), ops.sigma_z) < 1e-15 &&
               max_abs_diff(spin_observable(std::numbers::pi / 2.0, 0.0), ops.sigma_x) < 1e-15;
    });

    run("spin-observable-spectrum", [] {
        SplitMix64 src(0x5EC7);
        for (int i = 0; i < 100; ++i) {
            const Operator s =
                spin_observable((src.next_uniform() - 0.5) * 12.0, (src.next_uniform() - 0.5) * 12.0);
            if (!is_hermitian(s, 1e-12) || std::abs(s.trace()) > 1e-12) return false;
            const auto es = eigensystem_numeric(s);
            if (std::abs(es.eigenvalues[0] + 1.0) > 1e-10 ||
                std::abs(es.eigenvalues[1]) > 1e-10 ||
                std::abs(es.eigenvalues[2] - 1.0) > 1e-10)
                return false;
        }
        return true;
    });

    run("sx-eigensystem-agreement", [] {
        const auto numeric = eigensystem_numeric(make_spin_operators().sigma_x);
        const auto analytic = eigensystem_sx_analytic();
        for (std::size_t a = 0; a < 3; ++a) {
            bool matched = false;
            for (std::size_t n = 0; n < 3; ++n) {
                if (std::abs(numeric.eigenvalues[n] - analytic.eigenvalues[a]) < 1e-8) {
                    if (std::abs(std::abs(inner(numeric.eigenvectors[n],
                                                analytic.eigenvectors[a])) -
                                 1.0) > 1e-8)
                        return false;
                    matched = true;
                    break;
                }
            }
            if (!matched) return false;
        }
        return true;
    });

    run("born-distributions", [] {
        const std::array<double, 3> qrng_dist{0.25, 0.5, 0.25};
        for (const auto prep : {Preparation::plus_one, Preparation::minus_one,
                                Preparation::superposition}) {
            const auto p = outcome_distribution(prep).p;
            for (std::size_t d = 0; d < 3; ++d)
                if (std::abs(p[d] - qrng_dist[d]) > 1e-12) return false;
        }
        const auto legacy = outcome_distribution(Preparation::legacy_sz_zero).p;
        return legacy[1] == 0.0 && std::abs(legacy[0] - 0.5) < 1e-12 &&
               std::abs(legacy[2] - 0.5) < 1e-12;
    });

    run("born-normalization-random", [] {
        SplitMix64 src(0xB04A);
        for (int i = 0; i < 200; ++i) {
            const Mat3 u = random_unitary(src);
            const StateVector psi{u(0, 0), u(1, 0), u(2, 0)};
            const auto basis = eigensystem_numeric(
                spin_observable(src.next_uniform() * 3.0, src.next_uniform() * 6.0));
            const auto p = born_probabilities(psi, basis);
            double sum = 0.0;
            for (const double v : p) {
                if (v < 0.0) return false;
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-12) return false;
        }
        return true;
    });

    run("projector-idempotence", [] {
        SplitMix64 src(0x9437);
        for (int i = 0; i < 200; ++i) {
            const Mat3 u = random_unitary(src);
            const auto p = projector(StateVector{u(0, 1), u(1, 1), u(2, 1)});
            if (max_abs_diff(p.matrix * p.matrix, p.matrix) > 1e-12) return false;
            if (std::abs(p.matrix.trace() - cplx{1.0, 0.0}) > 1e-12) return false;
        }
        return true;
    });

    run("preparation-constraints", [] {
        const auto states = solve_preparation_states();
        if (states.size() != 3) return false;
        const auto basis = eigensystem_sx_analytic();
        for (const auto& s : states) {
            const auto p = born_probabilities(s, basis);
            if (std::abs(p[0] - 0.25) > 1e-12 || std::abs(p[1] - 0.5) > 1e-12 ||
                std::abs(p[2] - 0.25) > 1e-12)
                return false;
        }
        return true;
    });

    run("context-admissibility", [] {
        SplitMix64 src(0xC0A7);
        for (int trial = 0; trial < 100; ++trial) {
            const Mat3 u = random_unitary(src);
            std::vector<ProjectionObservable> members;
            for (std::size_t c = 0; c < 3; ++c)
                members.push_back(projector(StateVector{u(0, c), u(1, c), u(2, c)}));
            if (!is_context(members, 3)) return false;
            const auto ctx = make_context(members);
            ValueAssignment v;
            int sum = 0;
            for (const auto& obs : ctx.members) {
                const int val = src.next_uniform() < 0.5 ? 0 : 1;
                v.assign(obs, val);
                sum += val;
            }
            if (check_admissible(v, {ctx}) != (sum == 1)) return false;
        }
        return true;
    });

    run("ux-unitarity", [] {
        const Mat3 ux = build_ux();
        return max_abs_diff(ux.adjoint() * ux, Mat3::identity()) < 1e-14;
    });

    run("ux-roundtrip", [] {
        const Mat3 ux = build_ux();
        const auto plan = decompose(ux);
        return plan.layers.size() <= 3 && max_abs_diff(reconstruct(plan), ux) < 1e-10;
    });

    run("random-unitary-roundtrip", [] {
        SplitMix64 src(0x4A2D);
        for (int i = 0; i < 100; ++i) {
            const Mat3 u = random_unitary(src);
            if (max_abs_diff(reconstruct(decompose(u)), u) > 1e-9) return false;
        }
        return true;
    });

    run("plan-amplitudes", [] {
        const auto plan = decompose(build_ux());
        const Vec3 amps = reconstruct(plan) * Vec3{1.0, 0.0, 0.0};
        return std::abs(std::norm(amps[0]) - 0.25) < 1e-10 &&
               std::abs(std::norm(amps[1]) - 0.5) < 1e-10 &&
               std::abs(std::norm(amps[2]) - 0.25) < 1e-10;
    });

    bool all = true;
    ordered_json rows = ordered_json::array();
    for (const auto& c : checks) {
        rows.push_back({{"name", c.name}, {"pass", c.pass}});
        all = all && c.pass;
    }
    emit(ordered_json{{"checks", rows}, {"pass", all}}, out_path);
    std::cerr << (all ? "all physics checks passed\n" : "physics checks FAILED\n");
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-1 ternary QRNG simulator and randomness analysis harness"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::uint64_t count = 0;
    std::string prep = "plus1";
    std::string accuracy = "sqrtlog";
    std::string out_path;
    std::string in_path;
    std::string format = "json";
    std::uint32_t window = 16;

    auto* generate = app.add_subcommand("generate", "sample a ternary digit stream");
    generate->add_option("--seed", seed, "entropy seed")->capture_default_str();
    generate->add_option("--count", count, "number of digits")->required();
    generate->add_option("--prep", prep, "preparation: plus1|minus1|superposition|legacy")
        ->capture_default_str();
    generate->add_option("--out", out_path, "output packed ternary file")->required();
    generate->add_option("--format", format, "machine output format")
        ->check(CLI::IsMember({"json"}));

    auto* transform = app.add_subcommand("transform", "apply the ternary-to-binary morphism");
    transform->add_option("input", in_path, "packed ternary input file")->required();
    transform->add_option("--out", out_path, "output packed bit file")->required();
    transform->add_option("--format", format, "machine output format")
        ->check(CLI::IsMember({"json"}));

    auto* analyze = app.add_subcommand("analyze", "normality and frequency analysis");
    analyze->add_option("input", in_path, "packed bit input file")->required();
    analyze->add_option("--accuracy", accuracy, "sqrtlog|invlog|const:<f>")
        ->capture_default_str();
    auto* window_opt =
        analyze->add_option("--window", window, "run the predictor battery with this window");
    analyze->add_option("--out", out_path, "write the JSON report here instead of stdout");
    analyze->add_option("--format", format, "machine output format")
        ->check(CLI::IsMember({"json"}));

    std::vector<std::string> sources{"qrng", "lcg64", "xorshift64"};
    auto* compare = app.add_subcommand("compare", "run the battery across bit sources");
    compare->add_option("--sources", sources, "subset of: qrng, lcg64, xorshift64")
        ->delimiter(',')
        ->capture_default_str();
    compare->add_option("--count", count, "bits per source")->required();
    compare->add_option("--seed", seed, "entropy seed")->capture_default_str();
    compare->add_option("--accuracy", accuracy, "sqrtlog|invlog|const:<f>")
        ->capture_default_str();
    compare->add_option("--out", out_path, "write the JSON report here instead of stdout");
    compare->add_option("--format", format, "machine output format")
        ->check(CLI::IsMember({"json"}));

    std::string plan_path;
    auto* decompose_cmd =
        app.add_subcommand("decompose", "beam-splitter decomposition of a unitary");
    decompose_cmd->add_option("input", in_path,
                              "matrix JSON file to decompose (default: built-in U_x)");
    decompose_cmd->add_option("--reconstruct", plan_path,
                              "reconstruct a plan JSON file instead of decomposing");
    decompose_cmd->add_option("--out", out_path, "write the JSON result here");
    decompose_cmd->add_option("--format", format, "machine output format")
        ->check(CLI::IsMember({"json"}));

    auto* verify = app.add_subcommand("verify-physics",
                                      "run the spin-algebra and decomposition invariant suites");
    verify->add_option("--out", out_path, "write the JSON result here");
    verify->add_option("--format", format, "machine output format")
        ->check(CLI::IsMember({"json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(prep, seed, count, out_path);
        if (transform->parsed()) return cmd_transform(in_path, out_path);
        if (analyze->parsed())
            return cmd_analyze(in_path, accuracy, window, window_opt->count() > 0, out_path);
        if (compare->parsed()) return cmd_compare(sources, count, seed, accuracy, out_path);
        if (decompose_cmd->parsed()) return cmd_decompose(in_path, plan_path, out_path);
        if (verify->parsed()) return cmd_verify_physics(out_path);
    } catch (const CLI::ValidationError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 2;
}
