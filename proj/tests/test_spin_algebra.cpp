#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qrng/entropy.hpp"
#include "qrng/spin_algebra.hpp"
#include "qrng/unitary_decomp.hpp"

using namespace qrng;

namespace {

StateVector random_state(SplitMix64& src) {
    const Mat3 u = random_unitary(src);
    return {u(0, 0), u(1, 0), u(2, 0)};
}

}  // namespace

TEST_SUITE("spin_algebra") {

TEST_CASE("spin operators match the closed forms") {
    const auto ops = make_spin_operators();

    CHECK(std::abs(ops.sigma_x(0, 1) - cplx{kInvSqrt2, 0.0}) < 1e-15);
    CHECK(std::abs(ops.sigma_x(0, 2)) == 0.0);
    CHECK(std::abs(ops.sigma_z(0, 0) - cplx{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(ops.sigma_z(1, 1)) == 0.0);
    CHECK(std::abs(ops.sigma_z(2, 2) - cplx{-1.0, 0.0}) < 1e-15);
    CHECK(std::abs(ops.sigma_y(0, 1) - cplx{0.0, -kInvSqrt2}) < 1e-15);
    CHECK(std::abs(ops.sigma_y(1, 0) - cplx{0.0, kInvSqrt2}) < 1e-15);
    CHECK(std::abs(ops.s_plus(0, 1) - cplx{kSqrt2, 0.0}) < 1e-15);
    CHECK(std::abs(ops.s_minus(1, 0) - cplx{kSqrt2, 0.0}) < 1e-15);

    // sigma_x = (S+ + S-)/2 entrywise.
    const Mat3 half_sum = cplx{0.5, 0.0} * (ops.s_plus + ops.s_minus);
    CHECK(max_abs_diff(ops.sigma_x, half_sum) < 1e-15);

    CHECK(is_hermitian(ops.sigma_x, 1e-15));
    CHECK(is_hermitian(ops.sigma_y, 1e-15));
    CHECK(is_hermitian(ops.sigma_z, 1e-15));
    CHECK_FALSE(is_hermitian(ops.s_plus, 1e-15));
    CHECK(max_abs_diff(ops.s_plus.adjoint(), ops.s_minus) < 1e-15);
}

TEST_CASE("spin_observable reduces to sigma_z and sigma_x at the axis angles") {
    const auto ops = make_spin_operators();
    CHECK(max_abs_diff(spin_observable(0.0, 0.0), ops.sigma_z) < 1e-15);
    CHECK(max_abs_diff(spin_observable(std::numbers::pi / 2.0, 0.0), ops.sigma_x) < 1e-15);
    CHECK_THROWS_AS(spin_observable(std::nan(""), 0.0), std::invalid_argument);
}

TEST_CASE("spin_observable is Hermitian, traceless, spectrum {-1,0,1}") {
    SplitMix64 src(0x51AB);
    for (int i = 0; i < 100; ++i) {
        const double theta = (src.next_uniform() - 0.5) * 20.0;
        const double phi = (src.next_uniform() - 0.5) * 20.0;
        const Operator s = spin_observable(theta, phi);
        CHECK(is_hermitian(s, 1e-12));
        CHECK(std::abs(s.trace()) < 1e-12);
        const auto es = eigensystem_numeric(s);
        CHECK(std::abs(es.eigenvalues[0] + 1.0) < 1e-10);
        CHECK(std::abs(es.eigenvalues[1]) < 1e-10);
        CHECK(std::abs(es.eigenvalues[2] - 1.0) < 1e-10);
    }
}

TEST_CASE("analytic S_x eigensystem") {
    const auto es = eigensystem_sx_analytic();
    CHECK(es.eigenvalues[0] == 1.0);
    CHECK(es.eigenvalues[1] == 0.0);
    CHECK(es.eigenvalues[2] == -1.0);

    CHECK(max_abs_diff(es.eigenvectors[0], StateVector{0.5, kInvSqrt2, 0.5}) < 1e-15);
    CHECK(max_abs_diff(es.eigenvectors[1], StateVector{kInvSqrt2, 0.0, -kInvSqrt2}) < 1e-15);
    CHECK(max_abs_diff(es.eigenvectors[2], StateVector{0.5, -kInvSqrt2, 0.5}) < 1e-15);

    const Operator sx = make_spin_operators().sigma_x;
    for (std::size_t k = 0; k < 3; ++k) {
        const Vec3 residual = sx * es.eigenvectors[k] -
                              cplx{es.eigenvalues[k], 0.0} * es.eigenvectors[k];
        CHECK(residual.norm() < 1e-12);
    }
}

TEST_CASE("numeric eigensystem: diagonal input") {
    const auto es = eigensystem_numeric(make_spin_operators().sigma_z);
    CHECK(std::abs(es.eigenvalues[0] + 1.0) < 1e-14);
    CHECK(std::abs(es.eigenvalues[1]) < 1e-14);
    CHECK(std::abs(es.eigenvalues[2] - 1.0) < 1e-14);
    // Eigenvectors are the standard basis up to phase; phase fixing makes
    // them exactly the basis vectors.
    CHECK(std::abs(std::abs(es.eigenvectors[0][2]) - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(es.eigenvectors[1][1]) - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(es.eigenvectors[2][0]) - 1.0) < 1e-14);
}

TEST_CASE("numeric eigensystem agrees with the analytic S_x forms") {
    const auto numeric = eigensystem_numeric(make_spin_operators().sigma_x);
    const auto analytic = eigensystem_sx_analytic();
    // numeric is ascending, analytic descending: pair by eigenvalue.
    for (std::size_t a = 0; a < 3; ++a) {
        bool found = false;
        for (std::size_t n = 0; n < 3; ++n) {
            if (std::abs(numeric.eigenvalues[n] - analytic.eigenvalues[a]) < 1e-8) {
                const double overlap =
                    std::abs(inner(numeric.eigenvectors[n], analytic.eigenvectors[a]));
                CHECK(std::abs(overlap - 1.0) < 1e-8);
                found = true;
                break;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("numeric eigensystem: residuals and orthonormality on random observables") {
    SplitMix64 src(0xE16E);
    for (int i = 0; i < 50; ++i) {
        const Operator s = spin_observable(src.next_uniform() * 6.3, src.next_uniform() * 6.3);
        const auto es = eigensystem_numeric(s);
        for (std::size_t k = 0; k < 3; ++k) {
            const Vec3 residual =
                s * es.eigenvectors[k] - cplx{es.eigenvalues[k], 0.0} * es.eigenvectors[k];
            CHECK(residual.norm() < 1e-10);
            for (std::size_t l = 0; l < 3; ++l) {
                const double expected = k == l ? 1.0 : 0.0;
                CHECK(std::abs(std::abs(inner(es.eigenvectors[k], es.eigenvectors[l])) -
                               expected) < 1e-10);
            }
        }
    }
}

TEST_CASE("numeric eigensystem rejects non-Hermitian input") {
    CHECK_THROWS_AS(eigensystem_numeric(make_spin_operators().s_plus), NonHermitianInput);
}

TEST_CASE("numeric eigensystem handles badly scaled input") {
    const double scale = 1e8;
    const Operator big = cplx{scale, 0.0} * spin_observable(1.1, 2.2);
    // Hermiticity tolerance is absolute, so widen it to match the scale.
    const auto es = eigensystem_numeric(big, 1e-4);
    CHECK(std::abs(es.eigenvalues[0] + scale) < 1e-6 * scale);
    CHECK(std::abs(es.eigenvalues[2] - scale) < 1e-6 * scale);
    for (std::size_t k = 0; k < 3; ++k) {
        const Vec3 residual =
            big * es.eigenvectors[k] - cplx{es.eigenvalues[k], 0.0} * es.eigenvectors[k];
        CHECK(residual.norm() < 1e-9 * scale);
    }
}

TEST_CASE("Born probabilities of the sanctioned preparations") {
    const auto basis = eigensystem_sx_analytic();

    const auto p_plus = born_probabilities(StateVector{1.0, 0.0, 0.0}, basis);
    CHECK(std::abs(p_plus[0] - 0.25) < 1e-12);
    CHECK(std::abs(p_plus[1] - 0.5) < 1e-12);
    CHECK(std::abs(p_plus[2] - 0.25) < 1e-12);

    // (|+> - |->)/sqrt(2), which works out to |+1> itself.
    const StateVector ket_plus{kInvSqrt2, kInvSqrt2, 0.0};
    const StateVector ket_minus{-kInvSqrt2, kInvSqrt2, 0.0};
    const auto p_super =
        born_probabilities(cplx{kInvSqrt2, 0.0} * (ket_plus - ket_minus), basis);
    CHECK(std::abs(p_super[0] - 0.25) < 1e-12);
    CHECK(std::abs(p_super[1] - 0.5) < 1e-12);
    CHECK(std::abs(p_super[2] - 0.25) < 1e-12);

    // Eigenstate measurement.
    const auto p_eigen = born_probabilities(basis.eigenvectors[1], basis);
    CHECK(std::abs(p_eigen[0]) < 1e-12);
    CHECK(std::abs(p_eigen[1] - 1.0) < 1e-12);
    CHECK(std::abs(p_eigen[2]) < 1e-12);

    // S_z = 0 preparation: the S_x = 0 outcome has probability exactly zero.
    const auto p_legacy = born_probabilities(StateVector{0.0, 1.0, 0.0}, basis);
    CHECK(std::abs(p_legacy[0] - 0.5) < 1e-12);
    CHECK(p_legacy[1] == 0.0);
    CHECK(std::abs(p_legacy[2] - 0.5) < 1e-12);
}

TEST_CASE("Born probabilities reject unnormalized states and stay normalized") {
    const auto basis = eigensystem_sx_analytic();
    CHECK_THROWS_AS(born_probabilities(StateVector{0.5, 0.0, 0.0}, basis), UnnormalizedState);

    SplitMix64 src(0xB0B0);
    for (int i = 0; i < 100; ++i) {
        const StateVector psi = random_state(src);
        const auto basis_rot =
            eigensystem_numeric(spin_observable(src.next_uniform() * 3.0, src.next_uniform() * 6.0));
        const auto p = born_probabilities(psi, basis_rot);
        double sum = 0.0;
        for (const double v : p) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("projector: basis case, analytic case, idempotence") {
    const auto p1 = projector(StateVector{1.0, 0.0, 0.0});
    CHECK(max_abs_diff(p1.matrix, Mat3::diagonal(1.0, 0.0, 0.0)) < 1e-15);

    const auto p0x = projector(eigensystem_sx_analytic().eigenvectors[1]);
    Mat3 expected = Mat3::zero();
    expected(0, 0) = 0.5;
    expected(0, 2) = -0.5;
    expected(2, 0) = -0.5;
    expected(2, 2) = 0.5;
    CHECK(max_abs_diff(p0x.matrix, expected) < 1e-12);

    SplitMix64 src(0x9137);
    for (int i = 0; i < 100; ++i) {
        const auto p = projector(random_state(src));
        CHECK(max_abs_diff(p.matrix * p.matrix, p.matrix) < 1e-12);
        CHECK(std::abs(p.matrix.trace() - cplx{1.0, 0.0}) < 1e-12);
        CHECK(is_hermitian(p.matrix, 1e-12));
    }

    CHECK_THROWS_AS(projector(StateVector{0.0, 0.0, 0.0}), ZeroVector);
}

TEST_CASE("context detection") {
    const auto std_basis = std::vector<ProjectionObservable>{
        projector(StateVector{1.0, 0.0, 0.0}), projector(StateVector{0.0, 1.0, 0.0}),
        projector(StateVector{0.0, 0.0, 1.0})};
    CHECK(is_context(std_basis, 3));

    const auto sx = eigensystem_sx_analytic();
    const auto sx_basis = std::vector<ProjectionObservable>{projector(sx.eigenvectors[0]),
                                                            projector(sx.eigenvectors[1]),
                                                            projector(sx.eigenvectors[2])};
    CHECK(is_context(sx_basis, 3));

    // <1|1_x> = 1/2, not orthogonal.
    const auto mixed = std::vector<ProjectionObservable>{
        projector(StateVector{1.0, 0.0, 0.0}), projector(sx.eigenvectors[0]),
        projector(StateVector{0.0, 0.0, 1.0})};
    CHECK_FALSE(is_context(mixed, 3));

    CHECK_FALSE(is_context(std_basis, 2));
    CHECK_THROWS_AS(is_context({}, 0), std::invalid_argument);
}

TEST_CASE("admissibility over fully defined and partial assignments") {
    const auto p1 = projector(StateVector{1.0, 0.0, 0.0});
    const auto p0 = projector(StateVector{0.0, 1.0, 0.0});
    const auto pm = projector(StateVector{0.0, 0.0, 1.0});
    const auto ctx = make_context({p1, p0, pm});

    ValueAssignment good;
    good.assign(p1, 1);
    good.assign(p0, 0);
    good.assign(pm, 0);
    CHECK(check_admissible(good, {ctx}));

    ValueAssignment two_ones = good;
    two_ones.assign(p0, 1);
    CHECK_FALSE(check_admissible(two_ones, {ctx}));

    ValueAssignment all_zero;
    all_zero.assign(p1, 0);
    all_zero.assign(p0, 0);
    all_zero.assign(pm, 0);
    CHECK_FALSE(check_admissible(all_zero, {ctx}));

    // One member undefined: the context is skipped, vacuously admissible.
    ValueAssignment partial;
    partial.assign(p1, 1);
    partial.assign(p0, 1);
    CHECK(check_admissible(partial, {ctx}));
}

TEST_CASE("admissibility: randomized cross-check") {
    SplitMix64 src(0xADA);
    for (int trial = 0; trial < 50; ++trial) {
        // Random orthonormal triple as a context.
        const Mat3 u = random_unitary(src);
        std::vector<ProjectionObservable> members;
        for (std::size_t c = 0; c < 3; ++c)
            members.push_back(projector(StateVector{u(0, c), u(1, c), u(2, c)}));
        const auto ctx = make_context(members);

        ValueAssignment v;
        int sum = 0;
        for (const auto& obs : ctx.members) {
            const int val = src.next_uniform() < 0.5 ? 0 : 1;
            v.assign(obs, val);
            sum += val;
        }
        CHECK(check_admissible(v, {ctx}) == (sum == 1));
    }
}

TEST_CASE("preparation state candidates satisfy the amplitude constraints") {
    const auto states = solve_preparation_states();
    REQUIRE(states.size() == 3);

    bool has_plus = false, has_minus = false;
    for (const auto& s : states) {
        if (max_abs_diff(s, StateVector{1.0, 0.0, 0.0}) < 1e-12) has_plus = true;
        if (max_abs_diff(s, StateVector{0.0, 0.0, 1.0}) < 1e-12) has_minus = true;
    }
    CHECK(has_plus);
    CHECK(has_minus);

    const auto basis = eigensystem_sx_analytic();
    for (const auto& s : states) {
        const auto p = born_probabilities(s, basis);
        CHECK(std::abs(p[0] - 0.25) < 1e-12);
        CHECK(std::abs(p[1] - 0.5) < 1e-12);
        CHECK(std::abs(p[2] - 0.25) < 1e-12);
    }
}

}  // TEST_SUITE
