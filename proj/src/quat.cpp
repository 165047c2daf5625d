#include "hashi/quat.hpp"

#include <cmath>

namespace hashi {

namespace {
double g_tol = 1e-9;
}

double geom_tol() { return g_tol; }
void set_geom_tol(double tol) { g_tol = tol; }

double Quat::norm() const { return std::sqrt(norm2()); }

Quat Quat::inv() const {
    const double n2 = norm2();
    if (n2 == 0.0) throw DomainError("inverse of zero quaternion");
    return conj() / n2;
}

Quat quat_mul(const Quat &a, const Quat &b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

double dist(const Quat &a, const Quat &b) { return (a - b).norm(); }

Quat rotate(const Quat &p, const Quat &axis, double angle) {
    if (std::abs(axis.norm() - 1.0) > geom_tol() || std::abs(axis.w) > geom_tol())
        throw DomainError("rotate: axis must be a unit imaginary quaternion");
    const Quat sigma = Quat::real(std::cos(angle / 2)) + std::sin(angle / 2) * axis.imag();
    // sigma is unit, so its inverse is its conjugate
    return (sigma * p * sigma.conj()).imag();
}

Mat2 operator*(const Mat2 &a, const Mat2 &b) {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}
Mat2 operator+(const Mat2 &a, const Mat2 &b) {
    return {a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22};
}
Mat2 operator-(const Mat2 &a, const Mat2 &b) {
    return {a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
}
Mat2 operator*(cplx s, const Mat2 &a) { return {s * a.m11, s * a.m12, s * a.m21, s * a.m22}; }

Mat2 Mat2::inv() const {
    const cplx d = det();
    if (d == cplx(0.0)) throw DomainError("singular 2x2 matrix");
    return (1.0 / d) * adjugate();
}

double Mat2::norm() const {
    return std::sqrt(std::norm(m11) + std::norm(m12) + std::norm(m21) + std::norm(m22));
}

Mat2 to_matrix(const Quat &q) {
    return {cplx(q.w, q.x), cplx(-q.z, q.y), cplx(q.z, q.y), cplx(q.w, -q.x)};
}

Quat from_matrix(const Mat2 &m, double tol) {
    const double scale = 1.0 + m.norm();
    if (std::abs(m.m22 - std::conj(m.m11)) > tol * scale ||
        std::abs(m.m21 + std::conj(m.m12)) > tol * scale)
        throw StructureError("from_matrix: matrix is not quaternionic");
    // average the redundant entries so round-off is split evenly
    const cplx a = 0.5 * (m.m11 + std::conj(m.m22));
    const cplx b = 0.5 * (m.m12 - std::conj(m.m21));
    return {a.real(), a.imag(), b.imag(), -b.real()};
}

double chordal(const ExtC &a, const ExtC &b) {
    if (a.inf && b.inf) return 0.0;
    if (a.inf) return 2.0 / std::sqrt(1.0 + std::norm(b.z));
    if (b.inf) return 2.0 / std::sqrt(1.0 + std::norm(a.z));
    return 2.0 * std::abs(a.z - b.z) /
           std::sqrt((1.0 + std::norm(a.z)) * (1.0 + std::norm(b.z)));
}

ExtC mobius_apply(const MobiusMap &m, const ExtC &z) {
    cplx num, den;
    if (z.inf) {
        num = m.m11;
        den = m.m21;
    } else {
        num = m.m11 * z.z + m.m12;
        den = m.m21 * z.z + m.m22;
    }
    const double scale = m.norm() * (z.inf ? 1.0 : 1.0 + std::abs(z.z));
    if (std::abs(num) <= 1e-300 * scale && std::abs(den) <= 1e-300 * scale)
        throw DomainError("mobius_apply: point is the kernel of a singular map");
    if (den == cplx(0.0) || std::abs(num) > 1e300 * std::abs(den)) return ExtC::infinity();
    return {num / den, false};
}

namespace {

// projective point of a nonzero vector (p, q)
ExtC proj(cplx p, cplx q) {
    if (std::abs(q) <= 1e-15 * std::abs(p)) return ExtC::infinity();
    return {p / q, false};
}

ExtC eigen_direction(const Mat2 &m, cplx lam) {
    const cplx a1 = m.m12, b1 = lam - m.m11;
    const cplx a2 = lam - m.m22, b2 = m.m21;
    if (std::norm(a1) + std::norm(b1) >= std::norm(a2) + std::norm(b2)) return proj(a1, b1);
    return proj(a2, b2);
}

}  // namespace

FixedPoints mobius_fixed_points(const MobiusMap &m0) {
    FixedPoints out;
    const double nrm = m0.norm();
    if (nrm == 0.0) throw DomainError("mobius_fixed_points: zero matrix");
    const Mat2 m = (1.0 / nrm) * m0;
    const double eps = 1e-13;

    if (std::abs(m.m12) <= eps && std::abs(m.m21) <= eps && std::abs(m.m11 - m.m22) <= eps) {
        out.all_fixed = true;
        return out;
    }
    if (std::abs(m.det()) <= eps) {
        out.singular = true;
        const bool col1 = std::norm(m.m11) + std::norm(m.m21) >= std::norm(m.m12) + std::norm(m.m22);
        const ExtC image = col1 ? proj(m.m11, m.m21) : proj(m.m12, m.m22);
        const bool row1 = std::norm(m.m11) + std::norm(m.m12) >= std::norm(m.m21) + std::norm(m.m22);
        out.kernel = row1 ? proj(-m.m12, m.m11) : proj(-m.m22, m.m21);
        // nilpotent maps send everything to the kernel point and fix nothing
        if (std::abs(m.trace()) > eps) {
            out.points.push_back(image);
            out.eigenvalues.push_back(m.trace() * nrm);
        }
        return out;
    }
    const cplx tr = m.trace();
    const cplx disc = std::sqrt(tr * tr - 4.0 * m.det());
    if (std::abs(disc) <= 1e-12) {
        out.points.push_back(eigen_direction(m, 0.5 * tr));
        out.eigenvalues.push_back(0.5 * tr * nrm);
        return out;
    }
    for (const cplx lam : {0.5 * (tr + disc), 0.5 * (tr - disc)}) {
        out.points.push_back(eigen_direction(m, lam));
        out.eigenvalues.push_back(lam * nrm);
    }
    return out;
}

ExtC stereographic(const Quat &v, double l) {
    if (l <= 0.0) throw DomainError("stereographic: radius must be positive");
    if (std::abs(v.norm() - l) > geom_tol() || std::abs(v.w) > geom_tol())
        throw DomainError("stereographic: point is not on the sphere of radius l");
    const Quat num = 2.0 * (kI * v) - Quat::real(2.0 * l);
    const Quat den = (kJ * v) / l + kK;
    if (den.norm() <= 1e-14 * (1.0 + num.norm())) return ExtC::infinity();
    const Quat z = num * den.inv();
    return {cplx(z.w, z.x), false};
}

Quat gauged_unchart(const ExtC &zeta, double l) {
    if (zeta.inf) return l * kI;
    const cplx c = zeta.z;
    const double r2 = std::norm(c);
    const double d = 1.0 + r2;
    return Quat::vec(l * (r2 - 1.0) / d, 2.0 * l * c.real() / d, 2.0 * l * c.imag() / d);
}

ExtC gauged_chart(const Quat &v, double l) {
    ExtC z = stereographic(v, l);
    if (!z.inf) z.z /= 2.0 * l;
    return z;
}

Quat unstereographic(const ExtC &z, double l) {
    if (z.inf) return gauged_unchart(z, l);
    return gauged_unchart({z.z / (2.0 * l), false}, l);
}

}  // namespace hashi
