#pragma once

// Dense complex linear algebra for a three-level system: Vec3 (kets) and
// Mat3 (observables / unitaries), with the handful of operations the rest
// of the library needs. Everything is a plain value; no allocation.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

namespace qrng {

using cplx = std::complex<double>;

inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kInvSqrt2 = 0.7071067811865475244;

struct Vec3 {
    std::array<cplx, 3> c{};

    constexpr Vec3() = default;
    constexpr Vec3(cplx a, cplx b, cplx d) : c{a, b, d} {}

    constexpr cplx& operator[](std::size_t i) { return c[i]; }
    constexpr const cplx& operator[](std::size_t i) const { return c[i]; }

    friend Vec3 operator+(const Vec3& a, const Vec3& b) {
        return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
    }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) {
        return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
    }
    friend Vec3 operator*(cplx s, const Vec3& v) { return {s * v[0], s * v[1], s * v[2]}; }

    double norm_sq() const {
        return std::norm(c[0]) + std::norm(c[1]) + std::norm(c[2]);
    }
    double norm() const { return std::sqrt(norm_sq()); }

    bool is_finite() const {
        for (const auto& z : c) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
        return true;
    }
};

// ⟨a|b⟩ with the physics convention: conjugate-linear in the first slot.
inline cplx inner(const Vec3& a, const Vec3& b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
}

inline Vec3 normalized(const Vec3& v) {
    const double n = v.norm();
    if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
    return (cplx{1.0 / n, 0.0}) * v;
}

struct Mat3 {
    // Row-major storage.
    std::array<cplx, 9> m{};

    constexpr cplx& operator()(std::size_t r, std::size_t c) { return m[3 * r + c]; }
    constexpr const cplx& operator()(std::size_t r, std::size_t c) const { return m[3 * r + c]; }

    static constexpr Mat3 zero() { return {}; }
    static constexpr Mat3 identity() {
        Mat3 i;
        i(0, 0) = i(1, 1) = i(2, 2) = 1.0;
        return i;
    }
    static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        Mat3 a;
        for (std::size_t j = 0; j < 3; ++j) {
            a(0, j) = r0[j];
            a(1, j) = r1[j];
            a(2, j) = r2[j];
        }
        return a;
    }
    static Mat3 diagonal(cplx d0, cplx d1, cplx d2) {
        Mat3 a;
        a(0, 0) = d0;
        a(1, 1) = d1;
        a(2, 2) = d2;
        return a;
    }

    Mat3 adjoint() const {
        Mat3 a;
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 3; ++c) a(r, c) = std::conj((*this)(c, r));
        return a;
    }

    cplx trace() const { return m[0] + m[4] + m[8]; }

    friend Mat3 operator+(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (std::size_t i = 0; i < 9; ++i) r.m[i] = a.m[i] + b.m[i];
        return r;
    }
    friend Mat3 operator-(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (std::size_t i = 0; i < 9; ++i) r.m[i] = a.m[i] - b.m[i];
        return r;
    }
    friend Mat3 operator*(cplx s, const Mat3& a) {
        Mat3 r;
        for (std::size_t i = 0; i < 9; ++i) r.m[i] = s * a.m[i];
        return r;
    }
    friend Mat3 operator*(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                cplx acc = 0.0;
                for (std::size_t k = 0; k < 3; ++k) acc += a(i, k) * b(k, j);
                r(i, j) = acc;
            }
        return r;
    }
    friend Vec3 operator*(const Mat3& a, const Vec3& v) {
        Vec3 r;
        for (std::size_t i = 0; i < 3; ++i)
            r[i] = a(i, 0) * v[0] + a(i, 1) * v[1] + a(i, 2) * v[2];
        return r;
    }

    bool is_finite() const {
        for (const auto& z : m) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
        return true;
    }
};

// Max-norm distance, the tolerance currency used throughout.
inline double max_abs_diff(const Mat3& a, const Mat3& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < 9; ++i) d = std::max(d, std::abs(a.m[i] - b.m[i]));
    return d;
}

inline double max_abs_diff(const Vec3& a, const Vec3& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < 3; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

inline bool is_hermitian(const Mat3& a, double tol) {
    return max_abs_diff(a, a.adjoint()) <= tol;
}

inline bool is_unitary(const Mat3& a, double tol) {
    return max_abs_diff(a.adjoint() * a, Mat3::identity()) <= tol;
}

// |v⟩⟨v| without normalization.
inline Mat3 outer(const Vec3& v, const Vec3& w) {
    Mat3 a;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) a(r, c) = v[r] * std::conj(w[c]);
    return a;
}

}  // namespace qrng
