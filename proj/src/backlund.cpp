#include "hashi/backlund.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hashi {

std::vector<Mat2> frame_at(const DiscreteCurve &c, cplx lambda, std::size_t origin) {
    const auto S = tangents(c);
    const std::size_t nf = c.closed ? S.size() + 1 : c.size();
    if (origin >= nf) throw DomainError("frame_at: origin out of range");
    std::vector<Mat2> G(nf);
    G[origin] = Mat2::identity();
    for (std::size_t k = origin; k + 1 < nf; ++k) G[k + 1] = (Mat2::identity() + lambda * to_matrix(S[k])) * G[k];
    for (std::size_t k = origin; k-- > 0;) G[k] = (Mat2::identity() + lambda * to_matrix(S[k])).inv() * G[k + 1];
    return G;
}

std::pair<cplx, cplx> solve_rho(cplx w1, cplx w2, cplx lambda0) {
    // [w1 w2; conj w2, -conj w1] (a, b)^T = (-w1/lambda0, -conj(w2)/conj(lambda0))
    const double n2 = std::norm(w1) + std::norm(w2);
    const cplx il = 1.0 / lambda0, ilb = std::conj(il);
    const cplx a = -(std::norm(w1) * il + std::norm(w2) * ilb) / n2;
    const cplx b = -(w1 * std::conj(w2) * (il - ilb)) / n2;
    return {a, b};
}

DressResult dress(const DiscreteCurve &c, const DressParamsAlgebraic &p, std::size_t origin, Exec ex) {
    if (p.lambda0.imag() == 0.0) throw DomainError("dress: lambda0 must be non-real");
    const auto G = frame_at(c, p.lambda0, origin);
    const long nf = static_cast<long>(G.size());
    DressResult out;
    out.state.rho.resize(G.size());
    out.state.v.resize(G.size());
    long bad = -1;
    auto body = [&](long k) -> bool {
        const Mat2 &g = G[static_cast<std::size_t>(k)];
        const cplx w1 = g.m11 + g.m12 * p.s0;
        const cplx w2 = g.m21 + g.m22 * p.s0;
        if (std::sqrt(std::norm(w1) + std::norm(w2)) <= 1e-12 * g.norm()) return false;
        const auto [a, b] = solve_rho(w1, w2, p.lambda0);
        const Quat rho{a.real(), a.imag(), b.imag(), -b.real()};
        out.state.rho[static_cast<std::size_t>(k)] = rho;
        out.state.v[static_cast<std::size_t>(k)] = rho.imag();
        return true;
    };
    if (ex == Exec::Parallel) {
#pragma omp parallel for reduction(max : bad)
        for (long k = 0; k < nf; ++k)
            if (!body(k)) bad = std::max(bad, k);
    } else {
        for (long k = 0; k < nf; ++k)
            if (!body(k)) bad = std::max(bad, k);
    }
    if (bad >= 0) throw DressingSingularity("dressing singularity at vertex " + std::to_string(bad));

    out.curve.closed = c.closed;
    out.curve.vertices.resize(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) out.curve.vertices[k] = c[k] + out.state.v[k];
    if (c.closed) out.periodicity_defect = (out.state.v.back() - out.state.v.front()).norm();
    out.state.nu = -1.0 / p.lambda0;
    return out;
}

EdgeCoupling edge_coupling(double s, double l, double delta1, Branch branch) {
    EdgeCoupling ec;
    if (s <= 0 || l <= 0) throw DomainError("edge_coupling: lengths must be positive");
    if (delta1 == 0.0) {
        ec.identity = true;
        ec.nu = cplx(0.0, l);
        return ec;
    }
    const double sd2 = l / s * std::sin(delta1);
    if (std::abs(sd2) > 1.0 + 1e-12) throw BranchError("no real delta2 for l/s sin(delta1) > 1");
    double d2 = std::asin(std::clamp(sd2, -1.0, 1.0));
    if (branch == Branch::Reflected) d2 = (d2 >= 0 ? std::numbers::pi : -std::numbers::pi) - d2;
    const double T = std::tan(delta1 / 2);
    ec.delta2 = d2;
    ec.k = T * std::tan(d2 / 2);
    ec.nu = cplx(-s * T * (1 - ec.k * ec.k) / (T * T + ec.k * ec.k), l);
    return ec;
}

PropagateResult propagate_v(const Quat &S, const Quat &v, double delta1, Branch branch) {
    const double s = S.norm(), l = v.norm();
    if (s <= geom_tol() || l <= geom_tol()) throw DomainError("propagate_v: zero vector");
    if (cross(S, v).norm() <= geom_tol() * s * l) throw DomainError("propagate_v: v parallel to S, fold plane undefined");
    PropagateResult r;
    r.coupling = edge_coupling(s, l, delta1, branch);
    const double k = r.coupling.k;
    const Quat sigma = Quat::real(std::cos(delta1 / 2)) + std::sin(delta1 / 2) / s * S;
    const Quat Sinv = S.inv();
    const Quat X = (s / l) * (sigma * v * sigma.conj()) * Sinv;
    const Quat den = k * X - Quat::real(1.0);
    if (den.norm() <= 1e-14) throw DomainError("propagate_v: singular fractional-linear map");
    r.v_plus = ((l * s) * (X - Quat::real(k)) * den.inv() * Sinv).imag();
    r.S_tilde = S + r.v_plus - v;
    return r;
}

MobiusMap mobius_of_edge(const Quat &S, double l, double delta1, Branch branch) {
    const EdgeCoupling ec = edge_coupling(S.norm(), l, delta1, branch);
    if (ec.identity) return Mat2::identity();
    return Mat2::scalar(ec.nu) - to_matrix(S);
}

double zero_curvature_check(const Quat &S, const Quat &v, const Quat &v_plus, const Quat &S_tilde, cplx nu) {
    const double r = nu.real();
    double worst = 0;
    for (const double lam : {0.0, 1.0, -2.0}) {
        const Quat L = (Quat::real(lam) + S_tilde) * (Quat::real(lam + r) + v);
        const Quat R = (Quat::real(lam + r) + v_plus) * (Quat::real(lam) + S);
        worst = std::max(worst, (L - R).norm());
    }
    return worst;
}

BacklundResult backlund_geometric(const DiscreteCurve &c, const DressParamsGeometric &p) {
    const auto S = tangents(c);
    if (std::abs(p.v0.norm() - p.l) > geom_tol() || std::abs(p.v0.w) > geom_tol())
        throw DomainError("backlund_geometric: |v0| must equal l");
    BacklundResult out;
    std::vector<Quat> &v = out.state.v;
    v.push_back(p.v0);
    for (std::size_t n = 0; n < S.size(); ++n) {
        const auto pr = propagate_v(S[n], v.back(), p.delta1, p.branch);
        const double zc = zero_curvature_check(S[n], v.back(), pr.v_plus, pr.S_tilde, pr.coupling.nu);
        out.max_zero_curvature = std::max(out.max_zero_curvature, zc);
        if (n == 0) out.state.nu = pr.coupling.nu;
        v.push_back(pr.v_plus);
    }
    for (const auto &vn : v) out.state.rho.push_back(Quat::real(out.state.nu.real()) + vn);
    out.curve.closed = out.traktrix.closed = c.closed;
    for (std::size_t k = 0; k < c.size(); ++k) {
        out.curve.vertices.push_back(c[k] + v[k]);
        out.traktrix.vertices.push_back(c[k] + 0.5 * v[k]);
    }
    if (c.closed) out.closure_gap = (v.back() - v.front()).norm();
    return out;
}

DressParamsAlgebraic algebraic_from_geometric(const DressParamsGeometric &p, double s) {
    const EdgeCoupling ec = edge_coupling(s, p.l, p.delta1, p.branch);
    if (ec.identity) throw DomainError("identity transform has no algebraic parameters");
    const ExtC zeta = gauged_chart(p.v0, p.l);
    if (!zeta.inf && std::abs(zeta.z) == 0.0) throw DomainError("v0 = -l I corresponds to s0 = infinity");
    DressParamsAlgebraic a;
    a.lambda0 = -1.0 / ec.nu;
    a.s0 = zeta.inf ? cplx(0.0) : 1.0 / zeta.z;
    return a;
}

BianchiResult bianchi(const Quat &rho_hat, const Quat &rho_tilde) {
    const Quat D = rho_hat - rho_tilde;
    if (D.norm() <= geom_tol()) throw DomainError("bianchi: degenerate permutability (equal factors)");
    const Quat Di = D.inv();
    return {D * rho_tilde * Di, D * rho_hat * Di};
}

cplx transported_s0(const Quat &rho0, cplx lambda0, cplx s0) {
    const Mat2 B = Mat2::identity() + lambda0 * to_matrix(rho0);
    const cplx p = B.m11 + B.m12 * s0;
    const cplx q = B.m21 + B.m22 * s0;
    if (std::abs(p) <= 1e-300) throw DomainError("transported_s0: parameter at infinity");
    return q / p;
}

PeriodicParams periodic_dress_params(const DiscreteCurve &c, cplx lambda0) {
    if (!c.closed) throw DomainError("periodic_dress_params requires a closed curve");
    const auto G = frame_at(c, lambda0);
    const FixedPoints fp = mobius_fixed_points(G.back());
    PeriodicParams out;
    if (fp.all_fixed) throw DomainError("monodromy is scalar; every s0 is admissible");
    for (const auto &z : fp.points) {
        // eigenvector (z, 1) ~ (1, 1/z)
        if (z.inf) out.s0.push_back(0.0);
        else if (std::abs(z.z) > 0) out.s0.push_back(1.0 / z.z);
    }
    out.defective = fp.points.size() == 1;
    return out;
}

}  // namespace hashi
