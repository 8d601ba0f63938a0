#pragma once

// Spin-1 observable algebra: the generalized Pauli matrices, arbitrary-axis
// spin observables S(theta, phi), eigensystems (closed-form for S_x, Jacobi
// iteration for anything Hermitian), Born-rule outcome probabilities,
// rank-1 projectors, and context/admissibility checks for value assignments.
//
// Units: hbar = 1, so eigenvalues are the bare spin projections {-1, 0, +1}.
// Basis: the standard S_z basis |1> = (1,0,0), |0> = (0,1,0), |-1> = (0,0,1).
//
// Tolerances: exact algebraic constructions are held to 1e-12, quantities
// that pass through the iterative eigensolver to 1e-10.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qrng/linalg.hpp"

namespace qrng {

using StateVector = Vec3;
using Operator = Mat3;

inline constexpr double kNormTol = 1e-12;
inline constexpr double kOrthoTol = 1e-10;

struct NonHermitianInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct UnnormalizedState : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ZeroVector : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SpinOperators {
    Operator sigma_x;
    Operator sigma_y;
    Operator sigma_z;
    Operator s_plus;
    Operator s_minus;
};

// The spin-1 generalized Pauli matrices and ladder operators.
inline SpinOperators make_spin_operators() {
    SpinOperators ops;

    ops.sigma_z = Mat3::diagonal(1.0, 0.0, -1.0);

    // S+ = sqrt(2) * superdiagonal, S- = sqrt(2) * subdiagonal.
    ops.s_plus = Mat3::zero();
    ops.s_plus(0, 1) = kSqrt2;
    ops.s_plus(1, 2) = kSqrt2;
    ops.s_minus = ops.s_plus.adjoint();

    // sigma_x = (S+ + S-)/2, sigma_y = (S- - S+)/(2i).
    ops.sigma_x = cplx{0.5, 0.0} * (ops.s_plus + ops.s_minus);
    ops.sigma_y = (cplx{0.0, 1.0} / cplx{2.0, 0.0}) * (ops.s_minus - ops.s_plus);

    return ops;
}

// S(theta, phi) = u . S for the unit vector u given by polar angle theta and
// azimuthal angle phi. Hermitian, traceless, spectrum {-1, 0, +1}.
inline Operator spin_observable(double theta, double phi) {
    if (!std::isfinite(theta) || !std::isfinite(phi))
        throw std::invalid_argument("spin_observable: non-finite angle");
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const cplx e_minus = std::polar(1.0, -phi);
    const cplx e_plus = std::polar(1.0, phi);

    Operator s = Mat3::zero();
    s(0, 0) = ct;
    s(0, 1) = e_minus * st * kInvSqrt2;
    s(1, 0) = e_plus * st * kInvSqrt2;
    s(1, 2) = e_minus * st * kInvSqrt2;
    s(2, 1) = e_plus * st * kInvSqrt2;
    s(2, 2) = -ct;
    return s;
}

struct EigenSystem {
    std::array<double, 3> eigenvalues{};
    std::array<StateVector, 3> eigenvectors{};
};

// Closed-form eigensystem of S_x, ordered by descending eigenvalue (+1, 0, -1)
// to match the detector labeling used by the digit mapping downstream.
inline EigenSystem eigensystem_sx_analytic() {
    EigenSystem es;
    es.eigenvalues = {1.0, 0.0, -1.0};
    es.eigenvectors[0] = {0.5, kInvSqrt2, 0.5};
    es.eigenvectors[1] = {kInvSqrt2, 0.0, -kInvSqrt2};
    es.eigenvectors[2] = {0.5, -kInvSqrt2, 0.5};
    return es;
}

namespace detail {

// Make the first component with |v_k| > tol real and positive.
inline void fix_phase(Vec3& v, double tol = 1e-9) {
    for (std::size_t k = 0; k < 3; ++k) {
        const double a = std::abs(v[k]);
        if (a > tol) {
            const cplx rot = std::conj(v[k]) / a;
            v = rot * v;
            v[k] = cplx{std::abs(v[k]), 0.0};
            return;
        }
    }
}

}  // namespace detail

// Cyclic Jacobi diagonalization for Hermitian input. Eigenvalues ascending,
// eigenvectors orthonormal with the first nonzero component real positive.
inline EigenSystem eigensystem_numeric(const Operator& op, double herm_tol = kOrthoTol) {
    if (!is_hermitian(op, herm_tol))
        throw NonHermitianInput("eigensystem_numeric: input is not Hermitian");

    Mat3 a = cplx{0.5, 0.0} * (op + op.adjoint());  // symmetrize roundoff
    Mat3 v = Mat3::identity();

    double scale_sq = 0.0;
    for (const auto& z : a.m) scale_sq += std::norm(z);
    scale_sq = std::max(scale_sq, 1e-300);

    constexpr std::array<std::pair<std::size_t, std::size_t>, 3> pairs{
        {{0, 1}, {0, 2}, {1, 2}}};

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (const auto& [p, q] : pairs) off += std::norm(a(p, q));
        if (off < 1e-30 * scale_sq) break;

        for (const auto& [p, q] : pairs) {
            const cplx beta = a(p, q);
            const double ab = std::abs(beta);
            if (ab * ab < 1e-34 * scale_sq) continue;

            const double alpha = a(p, p).real();
            const double gamma = a(q, q).real();
            const cplx phase = beta / ab;  // e^{i arg beta}

            // Zero a(p,q) with U = [[c, -s*phase], [s*conj(phase), c]]:
            // t solves |b| t^2 - (gamma - alpha) t - |b| = 0. Smaller root,
            // in the rationalized form that stays accurate for large |tau|.
            const double tau = (gamma - alpha) / (2.0 * ab);
            const double t = (tau >= 0.0 ? -1.0 : 1.0) /
                             (std::abs(tau) + std::sqrt(1.0 + tau * tau));
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;

            // A <- U† A U (columns, then rows), V <- V U.
            for (std::size_t r = 0; r < 3; ++r) {
                const cplx arp = a(r, p), arq = a(r, q);
                a(r, p) = c * arp + s * std::conj(phase) * arq;
                a(r, q) = -s * phase * arp + c * arq;
                const cplx vrp = v(r, p), vrq = v(r, q);
                v(r, p) = c * vrp + s * std::conj(phase) * vrq;
                v(r, q) = -s * phase * vrp + c * vrq;
            }
            for (std::size_t col = 0; col < 3; ++col) {
                const cplx apc = a(p, col), aqc = a(q, col);
                a(p, col) = c * apc + s * phase * aqc;
                a(q, col) = -s * std::conj(phase) * apc + c * aqc;
            }
        }
    }

    std::array<std::size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenSystem es;
    for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t src = order[k];
        es.eigenvalues[k] = a(src, src).real();
        Vec3 vec{v(0, src), v(1, src), v(2, src)};
        detail::fix_phase(vec);
        es.eigenvectors[k] = vec;
    }
    return es;
}

// Born rule: p_i = |<v_i|psi>|^2, in the order of the basis eigenvectors.
inline std::array<double, 3> born_probabilities(const StateVector& state,
                                                const EigenSystem& basis) {
    if (std::abs(state.norm() - 1.0) > 1e-9)
        throw UnnormalizedState("born_probabilities: state norm deviates from 1");
    std::array<double, 3> p{};
    for (std::size_t i = 0; i < 3; ++i) p[i] = std::norm(inner(basis.eigenvectors[i], state));
    return p;
}

struct ProjectionObservable {
    StateVector direction;  // normalized
    Operator matrix;        // |psi><psi| / <psi|psi>
};

// Rank-1 projector onto span(state).
inline ProjectionObservable projector(const StateVector& state) {
    if (state.norm() < 1e-12) throw ZeroVector("projector: zero vector");
    ProjectionObservable p;
    p.direction = normalized(state);
    p.matrix = outer(p.direction, p.direction);
    return p;
}

// A context: n mutually orthogonal rank-1 projection observables.
inline bool is_context(const std::vector<ProjectionObservable>& obs, int n) {
    if (obs.empty()) throw std::invalid_argument("is_context: empty observable set");
    if (static_cast<int>(obs.size()) != n) return false;
    for (std::size_t i = 0; i < obs.size(); ++i)
        for (std::size_t j = i + 1; j < obs.size(); ++j)
            if (std::abs(inner(obs[i].direction, obs[j].direction)) >= kOrthoTol) return false;
    return true;
}

struct ContextSet {
    std::vector<ProjectionObservable> members;
    int dimension = 3;
};

inline ContextSet make_context(std::vector<ProjectionObservable> members) {
    const int n = static_cast<int>(members.size());
    if (!is_context(members, n))
        throw std::invalid_argument("make_context: members are not mutually orthogonal");
    return ContextSet{std::move(members), n};
}

// Partial {0,1} value assignment. Observables are identified by their
// projector: two entries refer to the same observable iff the matrices agree
// entrywise within tolerance (a global phase on the direction cancels there).
class ValueAssignment {
public:
    void assign(const ProjectionObservable& obs, int value) {
        if (value != 0 && value != 1)
            throw std::invalid_argument("ValueAssignment: value must be 0 or 1");
        for (auto& [p, v] : entries_) {
            if (max_abs_diff(p.matrix, obs.matrix) < kOrthoTol) {
                v = value;
                return;
            }
        }
        entries_.emplace_back(obs, value);
    }

    // nullopt = value indefinite.
    std::optional<int> value_of(const ProjectionObservable& obs) const {
        for (const auto& [p, v] : entries_) {
            if (max_abs_diff(p.matrix, obs.matrix) < kOrthoTol) return v;
        }
        return std::nullopt;
    }

    std::size_t size() const { return entries_.size(); }

private:
    std::vector<std::pair<ProjectionObservable, int>> entries_;
};

// Admissibility: every fully value-definite context must carry exactly one 1.
// Contexts with an indefinite member are skipped (vacuously admissible).
inline bool check_admissible(const ValueAssignment& v, const std::vector<ContextSet>& contexts) {
    for (const auto& ctx : contexts) {
        int sum = 0;
        bool all_defined = true;
        for (const auto& obs : ctx.members) {
            const auto val = v.value_of(obs);
            if (!val) {
                all_defined = false;
                break;
            }
            sum += *val;
        }
        if (all_defined && sum != 1) return false;
    }
    return true;
}

// The preparation states that produce S_x outcome probabilities
// (1/4, 1/2, 1/4): |+1>, |-1>, and (|+> - |->)/sqrt(2) with
// |+-> = (|0> +- |1>)/sqrt(2). Each returned state is checked against the
// three amplitude-modulus constraints
//   |x/2 + y/sqrt(2) + z/2| = 1/2,
//   |x/sqrt(2) - z/sqrt(2)| = 1/sqrt(2),
//   |x/2 - y/sqrt(2) + z/2| = 1/2,
// where (x, y, z) are the components on (|1>, |0>, |-1>).
inline std::vector<StateVector> solve_preparation_states() {
    const StateVector plus_one{1.0, 0.0, 0.0};
    const StateVector minus_one{0.0, 0.0, 1.0};

    const StateVector ket_plus{kInvSqrt2, kInvSqrt2, 0.0};
    const StateVector ket_minus{-kInvSqrt2, kInvSqrt2, 0.0};
    const StateVector superposition = cplx{kInvSqrt2, 0.0} * (ket_plus - ket_minus);

    const std::vector<StateVector> candidates{plus_one, minus_one, superposition};
    for (const auto& psi : candidates) {
        const double x_abs = std::abs(0.5 * psi[0] + kInvSqrt2 * psi[1] + 0.5 * psi[2]);
        const double y_abs = std::abs(kInvSqrt2 * psi[0] - kInvSqrt2 * psi[2]);
        const double z_abs = std::abs(0.5 * psi[0] - kInvSqrt2 * psi[1] + 0.5 * psi[2]);
        if (std::abs(x_abs - 0.5) > kNormTol || std::abs(y_abs - kInvSqrt2) > kNormTol ||
            std::abs(z_abs - 0.5) > kNormTol)
            throw std::logic_error("solve_preparation_states: constraint check failed");
    }
    return candidates;
}

}  // namespace qrng
