#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hashi {

using cplx = std::complex<double>;

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Absolute tolerance shared by all geometric predicates.
double geom_tol();
void set_geom_tol(double tol);

struct Quat {
    double w = 0, x = 0, y = 0, z = 0;

    Quat() = default;
    constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quat vec(double x, double y, double z) { return {0, x, y, z}; }
    static constexpr Quat real(double a) { return {a, 0, 0, 0}; }

    Quat conj() const { return {w, -x, -y, -z}; }
    double norm2() const { return w * w + x * x + y * y + z * z; }
    double norm() const;
    Quat inv() const;
    Quat imag() const { return {0, x, y, z}; }

    Quat &operator+=(const Quat &o) { w += o.w; x += o.x; y += o.y; z += o.z; return *this; }
    Quat &operator-=(const Quat &o) { w -= o.w; x -= o.x; y -= o.y; z -= o.z; return *this; }
    Quat &operator*=(double s) { w *= s; x *= s; y *= s; z *= s; return *this; }
};

inline Quat operator+(Quat a, const Quat &b) { return a += b; }
inline Quat operator-(Quat a, const Quat &b) { return a -= b; }
inline Quat operator-(const Quat &a) { return {-a.w, -a.x, -a.y, -a.z}; }
inline Quat operator*(Quat a, double s) { return a *= s; }
inline Quat operator*(double s, Quat a) { return a *= s; }
inline Quat operator/(Quat a, double s) { return a *= 1.0 / s; }

Quat quat_mul(const Quat &a, const Quat &b);
inline Quat operator*(const Quat &a, const Quat &b) { return quat_mul(a, b); }

inline constexpr Quat kI{0, 1, 0, 0};
inline constexpr Quat kJ{0, 0, 1, 0};
inline constexpr Quat kK{0, 0, 0, 1};

// Euclidean helpers on the imaginary parts.
inline double dot(const Quat &a, const Quat &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Quat cross(const Quat &a, const Quat &b) {
    return Quat::vec(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x);
}
double dist(const Quat &a, const Quat &b);

// span(1, I) is identified with C.
inline Quat from_complex(cplx c) { return {c.real(), c.imag(), 0, 0}; }

// sigma p sigma^-1 with sigma = cos(angle/2) + sin(angle/2) axis
Quat rotate(const Quat &p, const Quat &axis, double angle);

struct Mat2 {
    cplx m11, m12, m21, m22;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 scalar(cplx s) { return {s, 0.0, 0.0, s}; }
    cplx det() const { return m11 * m22 - m12 * m21; }
    cplx trace() const { return m11 + m22; }
    Mat2 inv() const;
    Mat2 adjugate() const { return {m22, -m12, -m21, m11}; }
    double norm() const;  // Frobenius
};

Mat2 operator*(const Mat2 &a, const Mat2 &b);
Mat2 operator+(const Mat2 &a, const Mat2 &b);
Mat2 operator-(const Mat2 &a, const Mat2 &b);
Mat2 operator*(cplx s, const Mat2 &a);

Mat2 to_matrix(const Quat &q);
// Requires m22 = conj(m11), m21 = -conj(m12) up to tol * (1 + |m|).
Quat from_matrix(const Mat2 &m, double tol = 1e-9);

// Point of the Riemann sphere.
struct ExtC {
    cplx z{0.0, 0.0};
    bool inf = false;

    static ExtC infinity() { return {cplx{0.0, 0.0}, true}; }
};

// Chordal distance on the unit Riemann sphere, in [0, 2].
double chordal(const ExtC &a, const ExtC &b);

using MobiusMap = Mat2;

ExtC mobius_apply(const MobiusMap &m, const ExtC &z);

struct FixedPoints {
    std::vector<ExtC> points;
    bool all_fixed = false;   // scalar multiple of the identity
    bool singular = false;    // rank one; the single returned point is the image point
    ExtC kernel;              // valid when singular
    std::vector<cplx> eigenvalues;  // aligned with points
};

FixedPoints mobius_fixed_points(const MobiusMap &m);

// Chart of the sphere of radius l realized by P = [[2I, -2l], [J/l, K]]:
// z = (2Iv - 2l)(Jv/l + K)^-1, an element of span(1, I).
ExtC stereographic(const Quat &v, double l);
Quat unstereographic(const ExtC &z, double l);

// The P-chart divided by 2l. In this coordinate (zeta, 1) is the eigenvector of
// the matrix of v for the eigenvalue il, and edge maps become nu - S.
ExtC gauged_chart(const Quat &v, double l);
Quat gauged_unchart(const ExtC &zeta, double l);

}  // namespace hashi
