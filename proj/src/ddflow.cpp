#include "hashi/ddflow.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace hashi {

namespace {

void require_closed(const DiscreteCurve &c) {
    if (!c.closed) throw DomainError("dd flow requires closed curve");
}

}  // namespace

DiscreteCurve reversed(const DiscreteCurve &c) {
    DiscreteCurve r = c;
    std::reverse(r.vertices.begin(), r.vertices.end());
    return r;
}

SweepMonodromy sweep_monodromy(const DiscreteCurve &c, const DDParams &p) {
    require_closed(c);
    const auto S = tangents(c);
    SweepMonodromy m;
    m.M = Mat2::identity();
    for (std::size_t n = 0; n < S.size(); ++n) {
        MobiusMap e;
        try {
            e = mobius_of_edge(S[n], p.l, p.delta1, p.branch);
        } catch (const BranchError &err) {
            throw BranchError(std::string(err.what()) + " at edge " + std::to_string(n));
        }
        m.M = e * m.M;
        m.M = (1.0 / m.M.norm()) * m.M;
    }
    m.fp = mobius_fixed_points(m.M);
    // rank-one edge maps (delta1 = +-pi/2, l = s): the product keeps only rounding noise
    // in its second singular value, so read image and kernel off the end factors
    const MobiusMap last = mobius_of_edge(S.back(), p.l, p.delta1, p.branch);
    if (!m.fp.all_fixed && std::abs(last.det()) <= 1e-13 * last.norm() * last.norm()) {
        const FixedPoints fl = mobius_fixed_points(last);
        if (!fl.points.empty()) {
            FixedPoints fp;
            fp.singular = true;
            fp.kernel = mobius_fixed_points(mobius_of_edge(S.front(), p.l, p.delta1, p.branch)).kernel;
            if (std::abs(m.M.trace()) > 1e-13 * m.M.norm()) {
                fp.points.push_back(fl.points.front());
                fp.eigenvalues.push_back(m.M.trace());
            }
            m.fp = fp;
        }
    }
    for (const auto &z : m.fp.points) m.vectors.push_back(gauged_unchart(z, p.l));
    return m;
}

FixedPointChoice select_fixed_point(const SweepMonodromy &m, const DiscreteCurve &c, const DDParams &p) {
    const auto S = tangents(c);
    const Quat back = -S.back();
    const Quat target = back / back.norm();
    FixedPointChoice ch;
    ch.singular = m.fp.singular;
    if (m.fp.all_fixed || m.vectors.empty()) {
        ch.all_fixed = m.fp.all_fixed;
        ch.v0 = p.l * target;
        return ch;
    }
    auto angle = [&](const Quat &v) {
        return std::acos(std::clamp(dot(v, target) / v.norm(), -1.0, 1.0));
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < m.vectors.size(); ++i) {
        const double ai = angle(m.vectors[i]), ab = angle(m.vectors[best]);
        if (ai < ab - 1e-15) {
            best = i;
        } else if (std::abs(ai - ab) <= 1e-15) {
            const ExtC zi = m.fp.points[i], zb = m.fp.points[best];
            const bool less = !zi.inf && (zb.inf || zi.z.real() < zb.z.real() ||
                                          (zi.z.real() == zb.z.real() && zi.z.imag() < zb.z.imag()));
            if (less) best = i;
        }
    }
    ch.v0 = m.vectors[best];
    ch.angle = angle(ch.v0);
    ch.warning = ch.angle > std::numbers::pi / 2;
    if (m.vectors.size() > 1) {
        const std::size_t other = best == 0 ? 1 : 0;
        ch.rejected = m.vectors[other];
        ch.collision = chordal(m.fp.points[0], m.fp.points[1]) < 1e-6;
    }
    return ch;
}

namespace {

BacklundResult transform(const DiscreteCurve &c, const DDParams &p, FixedPointChoice &choice) {
    const SweepMonodromy m = sweep_monodromy(c, p);
    choice = select_fixed_point(m, c, p);
    DressParamsGeometric g;
    g.l = p.l;
    g.delta1 = p.delta1;
    g.branch = p.branch;
    g.v0 = choice.v0;
    return backlund_geometric(c, g);
}

}  // namespace

DDStepResult dd_step_detail(const DiscreteCurve &c, const DDParams &p) {
    require_closed(c);
    DDStepResult out;
    const BacklundResult b1 = transform(c, p, out.first);
    DDParams q = p;
    q.delta1 = -p.delta1;
    const BacklundResult b2 = transform(reversed(b1.curve), q, out.second);
    out.curve = reversed(b2.curve);
    out.closure_gap = std::max(b1.closure_gap, b2.closure_gap);
    return out;
}

DiscreteCurve dd_step(const DiscreteCurve &c, const DDParams &p) { return dd_step_detail(c, p).curve; }

SurfaceSheet dd_sweep_surface(const DiscreteCurve &c, const DDParams &p, int steps) {
    require_closed(c);
    if (steps < 0) throw DomainError("dd_sweep_surface: negative step count");
    SurfaceSheet sh;
    sh.kind = "ddflow";
    sh.params["delta1"] = p.delta1;
    sh.params["l"] = p.l;
    sh.push(c, 0.0);
    DiscreteCurve cur = c;
    for (int i = 0; i < steps; ++i) {
        cur = dd_step(cur, p);
        sh.push(cur, static_cast<double>(i + 1));
    }
    return sh;
}

namespace {

struct ALSystem {
    Eigen::MatrixXd M;  // real-linear map from (a+, a0, a-) to the relation residual
    Eigen::VectorXd b;  // (q~ - q)/i
};

ALSystem build_al_system(const ComplexCurvature &psi, const ComplexCurvature &psi_t, ALReport &rep) {
    const long N = static_cast<long>(psi.size());
    auto q = [&](long n) { return psi.at(n); };
    auto qt = [&](long n) { return psi_t.at(n); };
    rep.A.assign(static_cast<std::size_t>(N + 1), 0.0);
    rep.Lambda.assign(static_cast<std::size_t>(N + 1), 1.0);
    cplx sum = 0.0;
    double lam = 1.0;
    for (long n = 0; n <= N; ++n) {
        rep.A[static_cast<std::size_t>(n)] = q(n) * std::conj(q(n - 1)) + sum;
        rep.Lambda[static_cast<std::size_t>(n)] = lam;
        sum += q(n) * std::conj(q(n - 1)) - qt(n) * std::conj(qt(n - 1));
        lam *= (1.0 + std::norm(qt(n))) / (1.0 + std::norm(q(n)));
    }
    rep.lambda_N = rep.Lambda.back();

    auto term = [&](long n, cplx ap, cplx a0, cplx am) {
        const auto &A = rep.A;
        const std::size_t i = static_cast<std::size_t>(n);
        return ap * q(n + 1) - a0 * q(n) + std::conj(a0) * qt(n) - std::conj(ap) * qt(n - 1) +
               ap * q(n) * A[i + 1] - std::conj(ap) * qt(n) * std::conj(A[i]) +
               (-std::conj(am) * qt(n + 1) + am * q(n - 1)) * (1.0 + std::norm(qt(n))) * rep.Lambda[i];
    };
    const cplx I(0.0, 1.0);
    const cplx basis[6][3] = {{1.0, 0.0, 0.0}, {I, 0.0, 0.0}, {0.0, 1.0, 0.0},
                              {0.0, I, 0.0},   {0.0, 0.0, 1.0}, {0.0, 0.0, I}};
    ALSystem sys;
    sys.M.resize(2 * N, 6);
    sys.b.resize(2 * N);
    for (long n = 0; n < N; ++n) {
        for (int j = 0; j < 6; ++j) {
            const cplx t = term(n, basis[j][0], basis[j][1], basis[j][2]);
            sys.M(2 * n, j) = t.real();
            sys.M(2 * n + 1, j) = t.imag();
        }
        const cplx lhs = (qt(n) - q(n)) / I;
        sys.b(2 * n) = lhs.real();
        sys.b(2 * n + 1) = lhs.imag();
    }
    return sys;
}

void set_alphas(ALReport &rep, Eigen::VectorXd x) {
    Eigen::Index imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    if (x(imax) < 0) x = -x;
    rep.alpha_plus = cplx(x(0), x(1));
    rep.alpha_0 = cplx(x(2), x(3));
    rep.alpha_minus = cplx(x(4), x(5));
}

void check_pair(const ComplexCurvature &psi, const ComplexCurvature &psi_t) {
    if (psi.size() != psi_t.size() || psi.size() < 3) throw DomainError("al_consistency: mismatched lengths");
    if (!psi.closed || !psi_t.closed) throw DomainError("al_consistency: periodic curvature required");
}

}  // namespace

ALReport al_consistency(const ComplexCurvature &psi, const ComplexCurvature &psi_t) {
    check_pair(psi, psi_t);
    ALReport rep;
    const ALSystem sys = build_al_system(psi, psi_t, rep);

    double diff = 0, scale = 0;
    for (std::size_t n = 0; n < psi.size(); ++n) {
        diff = std::max(diff, std::abs(psi_t.psi[n] - psi.psi[n]));
        scale = std::max(scale, std::abs(psi.psi[n]));
    }
    if (diff <= 1e-14 * (1.0 + scale) && std::abs(psi.twist - psi_t.twist) <= 1e-14) {
        rep.identity = true;
        return rep;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.M, Eigen::ComputeThinV);
    const auto &sv = svd.singularValues();
    rep.residual = sv(0) > 0 ? sv(5) / sv(0) : 0.0;
    for (int i = 0; i < 6; ++i)
        if (sv(i) <= 1e-10 * sv(0)) ++rep.nullity;
    set_alphas(rep, svd.matrixV().col(5));

    const Eigen::VectorXd y = sys.M.colPivHouseholderQr().solve(sys.b);
    rep.printed_residual = (sys.M * y - sys.b).norm() / std::max(sys.b.norm(), 1e-300);
    return rep;
}

ALElastic al_elastic_reduction(const ComplexCurvature &psi, double theta) {
    ComplexCurvature pt = psi;
    const cplx ph = std::polar(1.0, 2.0 * theta);
    for (auto &z : pt.psi) z *= ph;
    check_pair(psi, pt);
    ALReport rep;
    const ALSystem sys = build_al_system(psi, pt, rep);
    // remove the trivial direction a+ = a- = 0, a0 = e^{i theta}
    Eigen::VectorXd t = Eigen::VectorXd::Zero(6);
    t(2) = std::cos(theta);
    t(3) = std::sin(theta);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(6, 6) - t * t.transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q);
    Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(6, 5);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.M * basis, Eigen::ComputeThinV);
    const auto &sv = svd.singularValues();
    // numerical null space; real curvature (planar curves) makes it several-dimensional
    int k = 1;
    while (k < 5 && sv(4 - k) <= 1e-8 * sv(0)) ++k;
    const Eigen::MatrixXd Z = basis * svd.matrixV().rightCols(k);
    // X = e^{-i theta} a+ - conj(e^{-i theta} a-) as a real 2x6 map; take the null vector maximizing |X|
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix<double, 2, 6> L;
    L << c, s, 0, 0, -c, s,
        -s, c, 0, 0, -s, -c;
    Eigen::JacobiSVD<Eigen::MatrixXd> sx(L * Z, Eigen::ComputeFullV);
    const Eigen::VectorXd x = Z * sx.matrixV().col(0);
    ALElastic out;
    out.residual = sv(0) > 0 ? (sys.M * x).norm() / sv(0) : 0.0;
    out.al.nullity = k;
    set_alphas(out.al, x);
    out.al.residual = out.residual;
    const cplx e = std::polar(1.0, -theta);
    const cplx X = e * out.al.alpha_plus - std::conj(e * out.al.alpha_minus);
    if (std::abs(X) <= 1e-12) throw DomainError("al_elastic_reduction: degenerate constants");
    out.C = 2.0 * std::imag(e * out.al.alpha_0) / std::abs(X);
    out.mu = std::remainder(std::arg(X) - std::numbers::pi / 2, 2.0 * std::numbers::pi);
    // (C, mu) and (-C, mu + pi) give the same relation; keep cos mu >= 0
    if (std::cos(out.mu) < 0) {
        out.C = -out.C;
        out.mu = std::remainder(out.mu + std::numbers::pi, 2.0 * std::numbers::pi);
    }
    return out;
}

}  // namespace hashi
