#pragma once

// Decomposition of 3x3 unitaries into two-mode (beam splitter) layers plus
// output phases, and its inverse.
//
// Layer convention: a layer (i, j, theta, phi) with i < j acts as the
// identity outside modes {i, j} and as
//
//     [ e^{i phi} cos(theta)   -sin(theta) ]
//     [ e^{i phi} sin(theta)    cos(theta) ]
//
// on the (i, j) block. Application order: reconstruct(plan) applies the
// layers left-to-right as listed, then the diagonal phase matrix
// diag(e^{i phases[k]}) last. As matrices: D * L_n * ... * L_1.
//
// decompose() nulls the below-diagonal entries with at most three layers
// (pairs (0,2), (1,2), (0,1)) so the round trip holds to ~1e-12 for any
// unitary input.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "qrng/entropy.hpp"
#include "qrng/linalg.hpp"

namespace qrng {

struct NotUnitary : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BeamSplitterLayer {
    std::size_t mode_i = 0;
    std::size_t mode_j = 1;  // mode_i < mode_j <= 2
    double theta = 0.0;
    double phi = 0.0;

    Mat3 matrix() const {
        if (mode_i >= mode_j || mode_j > 2)
            throw std::invalid_argument("BeamSplitterLayer: bad mode pair");
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const cplx e = std::polar(1.0, phi);
        Mat3 m = Mat3::identity();
        m(mode_i, mode_i) = e * c;
        m(mode_i, mode_j) = -s;
        m(mode_j, mode_i) = e * s;
        m(mode_j, mode_j) = c;
        return m;
    }
};

struct DecompositionPlan {
    std::vector<BeamSplitterLayer> layers;
    std::array<double, 3> output_phases{};
};

// U_x: rows are the S_x eigenvectors for eigenvalues +1, 0, -1.
inline Mat3 build_ux() {
    Mat3 u;
    u(0, 0) = 0.5;
    u(0, 1) = kInvSqrt2;
    u(0, 2) = 0.5;
    u(1, 0) = kInvSqrt2;
    u(1, 1) = 0.0;
    u(1, 2) = -kInvSqrt2;
    u(2, 0) = 0.5;
    u(2, 1) = -kInvSqrt2;
    u(2, 2) = 0.5;
    return u;
}

inline Mat3 reconstruct(const DecompositionPlan& plan) {
    Mat3 m = Mat3::identity();
    for (const auto& layer : plan.layers) m = layer.matrix() * m;
    const Mat3 d = Mat3::diagonal(std::polar(1.0, plan.output_phases[0]),
                                  std::polar(1.0, plan.output_phases[1]),
                                  std::polar(1.0, plan.output_phases[2]));
    return d * m;
}

namespace detail {

// Pick (theta, phi) so that right-multiplying by the layer's adjoint zeroes
// the (row, i) entry against the (row, j) entry:
//   e^{-i phi} cos(theta) * u(row, i) - sin(theta) * u(row, j) = 0.
inline BeamSplitterLayer nulling_layer(const Mat3& u, std::size_t row, std::size_t i,
                                       std::size_t j) {
    BeamSplitterLayer layer{i, j, 0.0, 0.0};
    const cplx a = u(row, i);
    const cplx b = u(row, j);
    if (std::abs(a) < 1e-15) return layer;  // already null: identity layer
    if (std::abs(b) < 1e-15) {
        layer.theta = std::acos(0.0);  // pi/2
        return layer;
    }
    layer.theta = std::atan(std::abs(a) / std::abs(b));
    layer.phi = std::arg(a) - std::arg(b);
    return layer;
}

inline void apply_adjoint_from_right(Mat3& u, const BeamSplitterLayer& layer) {
    const double c = std::cos(layer.theta);
    const double s = std::sin(layer.theta);
    const cplx e = std::polar(1.0, -layer.phi);
    const std::size_t i = layer.mode_i, j = layer.mode_j;
    for (std::size_t r = 0; r < 3; ++r) {
        const cplx ui = u(r, i), uj = u(r, j);
        u(r, i) = e * c * ui - s * uj;
        u(r, j) = e * s * ui + c * uj;
    }
}

}  // namespace detail

// Decompose a unitary into at most three beam-splitter layers plus phases.
inline DecompositionPlan decompose(const Mat3& u) {
    if (!is_unitary(u, 1e-10)) throw NotUnitary("decompose: input is not unitary");

    Mat3 work = u;
    DecompositionPlan plan;

    // Null row 2 (entries (2,0) and (2,1)), then entry (1,0). Unitarity
    // forces what remains to be diagonal.
    const std::array<std::array<std::size_t, 3>, 3> steps{{
        {2, 0, 2},  // null (2,0) against column 2
        {2, 1, 2},  // null (2,1) against column 2
        {1, 0, 1},  // null (1,0) against column 1
    }};
    for (const auto& [row, i, j] : steps) {
        const auto layer = detail::nulling_layer(work, row, i, j);
        detail::apply_adjoint_from_right(work, layer);
        plan.layers.push_back(layer);
    }

    for (std::size_t k = 0; k < 3; ++k) plan.output_phases[k] = std::arg(work(k, k));
    return plan;
}

// Haar-ish random unitary: Gram-Schmidt on a complex Gaussian matrix.
template <UniformSource S>
Mat3 random_unitary(S& entropy) {
    auto gauss = [&entropy]() {
        // Box-Muller; guard the log away from 0.
        const double u1 = std::max(entropy.next_uniform(), 1e-300);
        const double u2 = entropy.next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return cplx{r * std::cos(6.283185307179586 * u2),
                    r * std::sin(6.283185307179586 * u2)};
    };

    std::array<Vec3, 3> cols;
    for (auto& col : cols) col = Vec3{gauss(), gauss(), gauss()};
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t prev = 0; prev < k; ++prev)
            cols[k] = cols[k] - inner(cols[prev], cols[k]) * cols[prev];
        cols[k] = normalized(cols[k]);
    }

    Mat3 q;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) q(r, c) = cols[c][r];
    return q;
}

// --- JSON wire format ------------------------------------------------------
//
// {"layers": [{"pair": [i, j], "theta": t, "phi": p}, ...],
//  "phases": [a, b, c]}           (angles in radians)

inline nlohmann::ordered_json plan_to_json(const DecompositionPlan& plan) {
    nlohmann::ordered_json j;
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : plan.layers) {
        j["layers"].push_back({{"pair", {layer.mode_i, layer.mode_j}},
                               {"theta", layer.theta},
                               {"phi", layer.phi}});
    }
    j["phases"] = plan.output_phases;
    return j;
}

inline DecompositionPlan plan_from_json(const nlohmann::json& j) {
    DecompositionPlan plan;
    for (const auto& jl : j.at("layers")) {
        BeamSplitterLayer layer;
        layer.mode_i = jl.at("pair").at(0).get<std::size_t>();
        layer.mode_j = jl.at("pair").at(1).get<std::size_t>();
        if (layer.mode_i >= layer.mode_j || layer.mode_j > 2)
            throw std::invalid_argument("plan_from_json: bad mode pair");
        layer.theta = jl.at("theta").get<double>();
        layer.phi = jl.at("phi").get<double>();
        plan.layers.push_back(layer);
    }
    const auto& phases = j.at("phases");
    if (phases.size() != 3) throw std::invalid_argument("plan_from_json: need 3 phases");
    for (std::size_t k = 0; k < 3; ++k) plan.output_phases[k] = phases.at(k).get<double>();
    return plan;
}

// {"matrix": [[[re, im] x3] x3]}, row-major.
inline nlohmann::ordered_json matrix_to_json(const Mat3& m) {
    nlohmann::ordered_json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < 3; ++r) {
        nlohmann::ordered_json row = nlohmann::json::array();
        for (std::size_t c = 0; c < 3; ++c)
            row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return nlohmann::ordered_json{{"matrix", rows}};
}

inline Mat3 matrix_from_json(const nlohmann::json& j) {
    const auto& rows = j.at("matrix");
    if (rows.size() != 3) throw std::invalid_argument("matrix_from_json: need 3 rows");
    Mat3 m;
    for (std::size_t r = 0; r < 3; ++r) {
        if (rows.at(r).size() != 3)
            throw std::invalid_argument("matrix_from_json: need 3 columns");
        for (std::size_t c = 0; c < 3; ++c) {
            const auto& e = rows.at(r).at(c);
            m(r, c) = cplx{e.at(0).get<double>(), e.at(1).get<double>()};
        }
    }
    return m;
}

}  // namespace qrng
