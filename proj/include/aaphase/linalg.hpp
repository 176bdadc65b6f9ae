// linalg.hpp -- minimal complex 2-vector / 2x2-matrix arithmetic.
//
// The whole model lives in C^2, so a dependency on a full linear-algebra
// library would be overkill; everything needed fits in a page.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace aaphase {

using cplx = std::complex<double>;

struct Vec2 {
    cplx x{}, y{};

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(cplx s) const { return {s * x, s * y}; }
};

inline Vec2 operator*(cplx s, const Vec2& v) { return v * s; }

// Hermitian inner product <a|b>, conjugating the first argument.
inline cplx dot(const Vec2& a, const Vec2& b) {
    return std::conj(a.x) * b.x + std::conj(a.y) * b.y;
}

inline double norm2(const Vec2& v) {
    return std::norm(v.x) + std::norm(v.y);
}

inline double norm(const Vec2& v) { return std::sqrt(norm2(v)); }

// Largest component magnitude of the difference; the sup-norm used by the
// oracle-equivalence checks.
inline double max_abs_diff(const Vec2& a, const Vec2& b) {
    return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

struct Mat2 {
    cplx a11{}, a12{}, a21{}, a22{};

    Vec2 operator*(const Vec2& v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator*(cplx s) const { return {s * a11, s * a12, s * a21, s * a22}; }
};

inline cplx det(const Mat2& m) { return m.a11 * m.a22 - m.a12 * m.a21; }

inline cplx trace(const Mat2& m) { return m.a11 + m.a22; }

// Conjugate transpose.
inline Mat2 adjoint(const Mat2& m) {
    return {std::conj(m.a11), std::conj(m.a21), std::conj(m.a12), std::conj(m.a22)};
}

// Adjugate: m * adjugate(m) = det(m) * I.  When det(m) = 0 its columns span
// the null space of m, which is how the special initial states are extracted.
inline Mat2 adjugate(const Mat2& m) {
    return {m.a22, -m.a12, -m.a21, m.a11};
}

struct SingularValues {
    double min, max;
};

// Singular values of a 2x2 complex matrix via the eigenvalues of m^H m.
inline SingularValues singular_values(const Mat2& m) {
    const Mat2 g = adjoint(m) * m;              // Hermitian, non-negative
    const double tr = std::real(trace(g));
    const double dt = std::norm(det(m));        // det(g) = |det(m)|^2
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * dt));
    const double lo = std::max(0.0, 0.5 * (tr - disc));
    const double hi = std::max(0.0, 0.5 * (tr + disc));
    return {std::sqrt(lo), std::sqrt(hi)};
}

} // namespace aaphase
