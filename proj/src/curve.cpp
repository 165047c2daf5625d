#include "hashi/curve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hashi {

std::vector<Quat> edges_unchecked(const DiscreteCurve &c) {
    const std::size_t n = c.size();
    std::vector<Quat> S;
    if (n < 2) return S;
    S.reserve(c.num_edges());
    for (std::size_t i = 0; i + 1 < n; ++i) S.push_back(c[i + 1] - c[i]);
    if (c.closed) S.push_back(c[0] - c[n - 1]);
    return S;
}

DiscreteCurve regular_polygon(std::size_t N, double edge) {
    if (N < 3) throw DomainError("regular_polygon: N must be at least 3");
    if (!(edge > 0)) throw DomainError("regular_polygon: edge must be positive");
    DiscreteCurve c;
    c.closed = true;
    const double R = edge / (2.0 * std::sin(std::numbers::pi / static_cast<double>(N)));
    for (std::size_t k = 0; k < N; ++k) {
        const double a = 2.0 * std::numbers::pi * (static_cast<double>(k) - 0.5) / static_cast<double>(N) - std::numbers::pi / 2;
        c.vertices.push_back({0.0, R * std::cos(a), R * std::sin(a), 0.0});
    }
    return c;
}

std::vector<Quat> tangents(const DiscreteCurve &c) {
    if (c.size() < 2) throw RegularityError("curve needs at least two vertices");
    auto S = edges_unchecked(c);
    for (std::size_t i = 0; i < S.size(); ++i)
        if (S[i].norm() <= geom_tol())
            throw RegularityError("degenerate edge " + std::to_string(i));
    return S;
}

double total_length(const DiscreteCurve &c) {
    double L = 0;
    for (const auto &s : edges_unchecked(c)) L += s.norm();
    return L;
}

double edge_length_deviation(const DiscreteCurve &c, double len) {
    double d = 0;
    for (const auto &s : edges_unchecked(c)) d = std::max(d, std::abs(s.norm() - len));
    return d;
}

bool is_arclength(const DiscreteCurve &c, double tol) {
    return c.size() >= 2 && edge_length_deviation(c, 1.0) <= tol;
}

Binormals binormals(const DiscreteCurve &c) {
    const auto S = tangents(c);
    const std::size_t n = c.size();
    Binormals out;
    out.b.assign(n, Quat{});
    out.defined.assign(n, false);
    Quat last;
    bool have = false;
    for (std::size_t v = 0; v < n; ++v) {
        const bool interior = c.closed || (v > 0 && v + 1 < n);
        if (interior) {
            const Quat &Sn = S[v % S.size()];
            const Quat &Sm = S[wrap(static_cast<long>(v) - 1, S.size())];
            const Quat cr = cross(Sn, Sm);
            const double len = cr.norm();
            if (len > geom_tol() * Sn.norm() * Sm.norm()) {
                out.b[v] = cr / len;
                out.defined[v] = true;
                last = out.b[v];
                have = true;
                continue;
            }
        }
        if (have) out.b[v] = last;
    }
    // leading undefined entries take the first defined binormal
    if (have) {
        std::size_t first = 0;
        while (!out.defined[first]) ++first;
        for (std::size_t v = 0; v < first; ++v) out.b[v] = out.b[first];
    }
    return out;
}

namespace {

Quat quat_from_rotation(const Eigen::Matrix3d &R) {
    Eigen::Quaterniond q(R);
    q.normalize();
    return {q.w(), q.x(), q.y(), q.z()};
}

Quat unit_perp(const Quat &e1, const Quat &hint) {
    Quat n = hint - dot(hint, e1) * e1;
    return n / n.norm();
}

}  // namespace

Quat default_seed(const DiscreteCurve &c) {
    const auto S = tangents(c);
    const Quat e1 = S[0] / S[0].norm();
    Quat e2;
    bool found = false;
    for (std::size_t k = 1; k < S.size() && !found; ++k) {
        const Quat p = S[k] - dot(S[k], e1) * e1;
        if (p.norm() > geom_tol() * S[k].norm()) {
            e2 = p / p.norm();
            found = true;
        }
    }
    if (!found) {
        // straight curve: any normal works; prefer J so the line along I gets F0 = 1
        e2 = std::abs(dot(e1, kJ)) < 0.9 ? unit_perp(e1, kJ) : unit_perp(e1, kK);
    }
    const Quat e3 = cross(e1, e2);
    Eigen::Matrix3d R;
    R << e1.x, e2.x, e3.x, e1.y, e2.y, e3.y, e1.z, e2.z, e3.z;
    // F^-1 x F = R x, so F^-1 is the quaternion of R
    return quat_from_rotation(R).conj();
}

ParallelFrame parallel_frame(const DiscreteCurve &c) { return parallel_frame(c, default_seed(c)); }

ParallelFrame parallel_frame(const DiscreteCurve &c, const Quat &F0) {
    const auto S = tangents(c);
    const std::size_t E = S.size();
    if (F0.norm() == 0.0) throw SeedError("seed frame must be invertible");
    Quat F = F0 / F0.norm();
    const Quat s0 = S[0] / S[0].norm();
    if ((F.conj() * kI * F - s0).norm() > 1e-8)
        throw SeedError("seed frame does not map I to the first tangent");

    ParallelFrame out;
    out.F.push_back(F);
    // closed curves get psi_0..psi_{N-1} and F_0..F_N; open curves psi_0..psi_{E-2}
    const std::size_t npsi = c.closed ? E : (E >= 1 ? E - 1 : 0);
    for (std::size_t n = 0; n < npsi; ++n) {
        const Quat &next = S[(n + 1) % E];
        Quat loc = F * next * F.conj();
        loc = loc / loc.norm();
        if (1.0 + loc.x <= 1e-12)
            throw RegularityError("anti-parallel tangents at vertex " + std::to_string(n + 1));
        const cplx psi = cplx(loc.y, loc.z) / (1.0 + loc.x);
        const Quat A{1.0, 0.0, psi.imag(), -psi.real()};
        out.psi.push_back(psi);
        out.A.push_back(A);
        F = A * F;
        F = F / F.norm();
        out.F.push_back(F);
    }
    return out;
}

cplx ComplexCurvature::at(long n) const {
    const long N = static_cast<long>(psi.size());
    if (!closed) return psi.at(static_cast<std::size_t>(n));
    long m = n >= 0 ? n / N : -((-n + N - 1) / N);
    const long r = n - m * N;
    cplx t = 1.0;
    const cplx base = m >= 0 ? twist : std::conj(twist) / std::norm(twist);
    for (long k = 0; k < std::abs(m); ++k) t *= base;
    return psi[static_cast<std::size_t>(r)] * t;
}

std::vector<double> ComplexCurvature::phi() const {
    std::vector<double> out;
    out.reserve(psi.size());
    for (const auto &p : psi) out.push_back(2.0 * std::atan(std::abs(p) / kCurvatureFactor));
    return out;
}

std::vector<double> ComplexCurvature::tau() const {
    std::vector<double> out;
    out.reserve(psi.size());
    double prev = 0.0;
    for (const auto &p : psi) {
        if (std::abs(p) == 0.0) {
            out.push_back(0.0);
            continue;
        }
        const double a = std::arg(p);
        out.push_back(std::remainder(a - prev, 2.0 * std::numbers::pi));
        prev = a;
    }
    return out;
}

ComplexCurvature complex_curvature(const DiscreteCurve &c) { return complex_curvature(c, default_seed(c)); }

ComplexCurvature complex_curvature(const DiscreteCurve &c, const Quat &F0) {
    const ParallelFrame pf = parallel_frame(c, F0);
    ComplexCurvature k;
    k.psi = pf.psi;
    k.closed = c.closed;
    if (c.closed) {
        const Quat H = pf.F.back() * pf.F.front().conj();
        const double alpha = std::atan2(H.x, H.w);
        k.twist = std::polar(1.0, 2.0 * alpha);
    }
    return k;
}

DiscreteCurve curve_from_curvature(const std::vector<cplx> &psi, const Quat &g0, const Quat &F0) {
    DiscreteCurve c;
    Quat F = F0 / F0.norm();
    Quat g = g0.imag();
    c.vertices.push_back(g);
    for (std::size_t n = 0; n <= psi.size(); ++n) {
        g += (F.conj() * kI * F).imag();
        c.vertices.push_back(g);
        if (n < psi.size()) {
            F = Quat{1.0, 0.0, psi[n].imag(), -psi[n].real()} * F;
            F = F / F.norm();
        }
    }
    return c;
}

DiscreteCurve closed_curve_from_curvature(const std::vector<cplx> &psi, const Quat &g0, const Quat &F0) {
    DiscreteCurve c = curve_from_curvature(psi, g0, F0);
    c.vertices.resize(psi.size());
    c.closed = true;
    return c;
}

namespace {

struct Polyline {
    std::vector<Quat> p;
    std::vector<double> s;  // cumulative arclength

    Quat at(double t) const {
        if (t <= 0) return p.front();
        if (t >= s.back()) return p.back();
        const auto it = std::upper_bound(s.begin(), s.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - s.begin()) - 1;
        const double seg = s[i + 1] - s[i];
        const double u = seg > 0 ? (t - s[i]) / seg : 0.0;
        return p[i] + u * (p[i + 1] - p[i]);
    }
    Quat tangent(double t) const {
        auto it = std::upper_bound(s.begin(), s.end(), t);
        std::size_t i = it == s.begin() ? 0 : static_cast<std::size_t>(it - s.begin()) - 1;
        while (i + 2 < s.size() && s[i + 1] - s[i] <= 0) ++i;
        i = std::min(i, p.size() - 2);
        const Quat e = p[i + 1] - p[i];
        return e / e.norm();
    }
};

}  // namespace

DiscreteCurve resample_arclength(const DiscreteCurve &c, std::size_t n_edges, double tol, int max_iter) {
    tangents(c);
    if (n_edges < (c.closed ? 3u : 1u)) throw ResampleError("too few edges requested");
    Polyline pl;
    pl.p = c.vertices;
    if (c.closed) pl.p.push_back(c.vertices.front());
    pl.s.push_back(0.0);
    for (std::size_t i = 1; i < pl.p.size(); ++i) pl.s.push_back(pl.s.back() + dist(pl.p[i], pl.p[i - 1]));
    const double L = pl.s.back();
    const std::size_t m = n_edges;

    // Newton on r_i = |P(t_{i+1}) - P(t_i)| - d, i < m, unknowns t_1..t_{m-1} and d,
    // starting from equal arclength
    std::vector<double> t(m + 1);
    for (std::size_t i = 0; i <= m; ++i) t[i] = L * static_cast<double>(i) / static_cast<double>(m);
    double d = L / static_cast<double>(m);
    const Eigen::Index n = static_cast<Eigen::Index>(m);
    auto residual = [&](const std::vector<double> &tt, double dd, Eigen::VectorXd &r) {
        r.resize(n);
        for (std::size_t i = 0; i < m; ++i) r(static_cast<Eigen::Index>(i)) = dist(pl.at(tt[i + 1]), pl.at(tt[i])) - dd;
    };
    Eigen::VectorXd r;
    residual(t, d, r);
    double damp = 1e-6;
    for (int it = 0; it < max_iter; ++it) {
        if (r.cwiseAbs().maxCoeff() <= tol * d) {
            DiscreteCurve out;
            out.closed = c.closed;
            for (std::size_t i = 0; i < (c.closed ? m : m + 1); ++i) out.vertices.push_back(pl.at(t[i]));
            return out;
        }
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < m; ++i) {
            const Quat chord = pl.at(t[i + 1]) - pl.at(t[i]);
            const double len = chord.norm();
            if (len <= 0) throw ResampleError("resample_arclength: coincident samples");
            const Quat u = chord / len;
            const Eigen::Index row = static_cast<Eigen::Index>(i);
            if (i + 1 < m) J(row, row) = dot(u, pl.tangent(t[i + 1]));  // column i <-> t_{i+1}
            if (i > 0) J(row, row - 1) = -dot(u, pl.tangent(t[i]));
            J(row, n - 1) = -1.0;  // d
        }
        // Levenberg-Marquardt: plain Newton first, more damping when it fails
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        bool accepted = false;
        for (int ls = 0; ls < 40 && !accepted; ++ls) {
            Eigen::VectorXd step;
            if (ls == 0) {
                step = J.partialPivLu().solve(-r);
            } else {
                Eigen::MatrixXd A = JtJ;
                A.diagonal().array() += damp * (1e-12 + JtJ.diagonal().array());
                step = A.ldlt().solve(-g);
                damp *= 4.0;
            }
            if (!step.allFinite()) continue;
            std::vector<double> tn = t;
            bool monotone = true;
            for (std::size_t i = 1; i < m; ++i) {
                tn[i] = t[i] + step(static_cast<Eigen::Index>(i - 1));
                if (!(tn[i] > tn[i - 1])) monotone = false;
            }
            if (!monotone || !(tn[m - 1] < tn[m])) continue;
            const double dn = d + step(n - 1);
            Eigen::VectorXd rn;
            residual(tn, dn, rn);
            if (rn.norm() < r.norm()) {
                t.swap(tn);
                d = dn;
                r = rn;
                accepted = true;
                damp = std::max(damp / 16.0, 1e-6);
            }
        }
        if (!accepted) break;
    }
    throw ResampleError("resample_arclength did not converge");
}

Quat RigidMotion::apply(const Quat &p) const {
    return (rotation * p.imag() * rotation.conj()).imag() + translation.imag();
}

DiscreteCurve RigidMotion::apply(const DiscreteCurve &c) const {
    DiscreteCurve out = c;
    for (auto &v : out.vertices) v = apply(v);
    return out;
}

RigidFit fit_rigid_motion(const DiscreteCurve &a, const DiscreteCurve &b) {
    if (a.size() != b.size() || a.size() == 0) throw DomainError("fit_rigid_motion: vertex counts differ");
    const std::size_t n = a.size();
    Eigen::Vector3d ca = Eigen::Vector3d::Zero(), cb = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        ca += Eigen::Vector3d(a[i].x, a[i].y, a[i].z);
        cb += Eigen::Vector3d(b[i].x, b[i].y, b[i].z);
    }
    ca /= static_cast<double>(n);
    cb /= static_cast<double>(n);
    Eigen::Matrix3d M = Eigen::Matrix3d::Zero(), Caa = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d pa = Eigen::Vector3d(a[i].x, a[i].y, a[i].z) - ca;
        const Eigen::Vector3d pb = Eigen::Vector3d(b[i].x, b[i].y, b[i].z) - cb;
        M += pa * pb.transpose();
        Caa += pa * pa.transpose();
    }
    const double Sxx = M(0, 0), Sxy = M(0, 1), Sxz = M(0, 2);
    const double Syx = M(1, 0), Syy = M(1, 1), Syz = M(1, 2);
    const double Szx = M(2, 0), Szy = M(2, 1), Szz = M(2, 2);
    Eigen::Matrix4d Nm;
    Nm << Sxx + Syy + Szz, Syz - Szy, Szx - Sxz, Sxy - Syx,
          Syz - Szy, Sxx - Syy - Szz, Sxy + Syx, Szx + Sxz,
          Szx - Sxz, Sxy + Syx, -Sxx + Syy - Szz, Syz + Szy,
          Sxy - Syx, Szx + Sxz, Syz + Szy, -Sxx - Syy + Szz;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(Nm);
    Eigen::Vector4d qv = es.eigenvectors().col(3);
    if (qv(0) < 0) qv = -qv;

    RigidFit fit;
    fit.motion.rotation = Quat{qv(0), qv(1), qv(2), qv(3)};
    fit.motion.rotation = fit.motion.rotation / fit.motion.rotation.norm();
    const Quat ra = fit.motion.apply(Quat::vec(ca(0), ca(1), ca(2)));
    fit.motion.translation = Quat::vec(cb(0), cb(1), cb(2)) - ra;

    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) ss += (fit.motion.apply(a[i]) - b[i]).norm2();
    fit.rmsd = std::sqrt(ss / static_cast<double>(n));

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> spread(Caa);
    fit.degenerate = n < 3 || spread.eigenvalues()(1) <= 1e-20 * std::max(1.0, spread.eigenvalues()(2));
    return fit;
}

}  // namespace hashi
