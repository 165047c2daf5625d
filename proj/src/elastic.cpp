#include "hashi/elastic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "hashi/semiflow.hpp"

namespace hashi {

ComplexCurvature elastic_curvature_sequence(const ElasticParams &p, std::size_t N) {
    ComplexCurvature out;
    if (N == 0) return out;
    out.psi.push_back(p.psi0);
    if (N > 1) out.psi.push_back(p.psi1);
    const cplx e = std::polar(1.0, -p.mu);
    for (std::size_t n = 1; n + 1 < N; ++n) {
        const cplx q = out.psi[n], qm = out.psi[n - 1];
        out.psi.push_back(e * (p.C * q / (1.0 + std::norm(q)) - e * qm));
    }
    return out;
}

double recurrence_residual(const ComplexCurvature &psi, double C, double mu) {
    const long n = static_cast<long>(psi.size());
    const cplx e = std::polar(1.0, mu);
    double worst = 0;
    const long lo = psi.closed ? 0 : 1, hi = psi.closed ? n : n - 1;
    for (long k = lo; k < hi; ++k) {
        const cplx q = psi.at(k);
        const cplx d = C * q / (1.0 + std::norm(q)) - e * psi.at(k + 1) - std::conj(e) * psi.at(k - 1);
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

ElasticFit elastic_fit(const ComplexCurvature &psi) {
    const long n = static_cast<long>(psi.size());
    const long lo = psi.closed ? 0 : 1, hi = psi.closed ? n : n - 1;
    if (hi - lo < 2) throw DomainError("elastic_fit: sequence too short");
    // unknowns (C, cos mu, sin mu):
    // C q/(1+|q|^2) - cos mu (q+ + q-) - sin mu i (q+ - q-) = 0
    Eigen::MatrixXd M(2 * (hi - lo), 3);
    const cplx I(0.0, 1.0);
    for (long k = lo; k < hi; ++k) {
        const cplx q = psi.at(k), qp = psi.at(k + 1), qm = psi.at(k - 1);
        const cplx cols[3] = {q / (1.0 + std::norm(q)), -(qp + qm), -I * (qp - qm)};
        for (int j = 0; j < 3; ++j) {
            M(2 * (k - lo), j) = cols[j].real();
            M(2 * (k - lo) + 1, j) = cols[j].imag();
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinV);
    const auto &sv = svd.singularValues();
    Eigen::Vector3d x = svd.matrixV().col(2);
    const double r = std::hypot(x(1), x(2));
    if (r <= 1e-300) throw DomainError("elastic_fit: degenerate sequence");
    x /= r;
    if (x(1) < 0) x = -x;
    ElasticFit f;
    f.C = x(0);
    f.mu = std::atan2(x(2), x(1));
    f.residual = sv(0) > 0 ? sv(2) / sv(0) : 0.0;
    return f;
}

namespace {

constexpr double kBig = 1e6;

// residual vector (g_N - g_0, S_N - S_0, S_{N+1} - S_1)
bool closure_residual(const ElasticParams &p, std::size_t N, Eigen::Matrix<double, 9, 1> &r) {
    const auto psi = elastic_curvature_sequence(p, N + 2).psi;
    for (const auto &z : psi)
        if (!std::isfinite(std::abs(z)) || std::abs(z) > 1e3) return false;
    const DiscreteCurve c = curve_from_curvature(psi);
    const auto S = edges_unchecked(c);
    const Quat d[3] = {c[N] - c[0], S[N] - S[0], S[N + 1] - S[1]};
    for (int i = 0; i < 3; ++i) {
        r(3 * i) = d[i].x;
        r(3 * i + 1) = d[i].y;
        r(3 * i + 2) = d[i].z;
    }
    return true;
}

double objective(const ElasticParams &p, std::size_t N) {
    Eigen::Matrix<double, 9, 1> r;
    if (!closure_residual(p, N, r)) return kBig;
    return r.squaredNorm();
}

struct Param {
    std::function<ElasticParams(const std::vector<double> &)> map;
    std::vector<double> x;
};

// Coordinate pattern search; gives up once the step is small and the objective is not.
double pattern_search(const Param &P, std::vector<double> &x, std::size_t N) {
    double f = objective(P.map(x), N);
    double h = 0.02;
    for (int it = 0; it < 20000 && h > 1e-15; ++it) {
        bool improved = false;
        for (std::size_t d = 0; d < x.size() && !improved; ++d) {
            for (const double s : {h, -h}) {
                auto y = x;
                y[d] += s;
                const double fy = objective(P.map(y), N);
                if (fy < f) {
                    f = fy;
                    x = y;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) h *= 0.5;
        if (f < 1e-8) break;
        if (h < 1e-4 && f > 1e-2) break;
    }
    return f;
}

// Levenberg-Marquardt on the 9-vector residual with a central-difference Jacobian.
double polish(const Param &P, std::vector<double> &x, std::size_t N) {
    const std::size_t m = x.size();
    double f = objective(P.map(x), N);
    double damp = 1e-6;
    for (int it = 0; it < 100 && f > 1e-30; ++it) {
        Eigen::Matrix<double, 9, 1> r0;
        if (!closure_residual(P.map(x), N, r0)) break;
        Eigen::MatrixXd J(9, static_cast<Eigen::Index>(m));
        bool ok = true;
        for (std::size_t j = 0; j < m && ok; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
            auto xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            Eigen::Matrix<double, 9, 1> rp, rm;
            ok = closure_residual(P.map(xp), N, rp) && closure_residual(P.map(xm), N, rm);
            if (ok) J.col(static_cast<Eigen::Index>(j)) = (rp - rm) / (2 * h);
        }
        if (!ok) break;
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r0;
        bool stepped = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal().array() += damp * (1.0 + JtJ.diagonal().array());
            const Eigen::VectorXd dx = A.ldlt().solve(-g);
            auto y = x;
            for (std::size_t j = 0; j < m; ++j) y[j] += dx(static_cast<Eigen::Index>(j));
            const double fy = objective(P.map(y), N);
            if (fy < f) {
                x = y;
                f = fy;
                damp = std::max(damp * 0.1, 1e-15);
                stepped = true;
                break;
            }
            damp *= 10;
        }
        if (!stepped) break;
    }
    return f;
}

bool is_planar(const std::vector<cplx> &psi) {
    return std::all_of(psi.begin(), psi.end(), [](cplx z) { return std::abs(z.imag()) <= 1e-12; });
}

void classify(ClosureResult &r, std::size_t N) {
    const auto psi = elastic_curvature_sequence(r.params, N).psi;
    r.turning = 0;
    r.sign_changes = 0;
    if (!is_planar(psi)) return;
    double tot = 0;
    for (std::size_t n = 0; n < N; ++n) {
        tot += 2.0 * std::atan(psi[n].real());
        if (psi[n].real() * psi[(n + 1) % N].real() < 0) ++r.sign_changes;
    }
    r.turning = static_cast<int>(std::lround(tot / (2.0 * std::numbers::pi)));
}

bool class_matches(const ClosureResult &r, ElasticClass cls) {
    switch (cls) {
    case ElasticClass::Any: return true;
    case ElasticClass::Convex: return std::abs(r.turning) == 1 && r.sign_changes == 0;
    case ElasticClass::FigureEight: return r.turning == 0 && r.sign_changes == 2;
    }
    return false;
}

}  // namespace

double closure_gap(const ElasticParams &p, std::size_t N) { return std::sqrt(objective(p, N)); }

ClosureResult closure_search(std::size_t N, double mu, const ClosureOptions &opt) {
    if (N < 3) throw DomainError("closure_search: N must be at least 3");
    if (mu != 0.0 && opt.cls != ElasticClass::Any)
        throw DomainError("closure_search: shape classes need mu = 0 (planar curves)");

    // general parametrization (C, psi0, psi1) and the planar ones (C, a) with psi1 = +-a
    const Param general{[mu](const std::vector<double> &x) {
                            return ElasticParams{x[0], mu, {x[1], x[2]}, {x[3], x[4]}};
                        },
                        {}};
    auto planar = [](double sgn) {
        return Param{[sgn](const std::vector<double> &x) {
                         return ElasticParams{x[0], 0.0, {x[1], 0.0}, {sgn * x[1], 0.0}};
                     },
                     {}};
    };
    const Param convex = planar(1.0), eight = planar(-1.0);

    std::vector<std::pair<const Param *, std::vector<double>>> starts;
    auto add_general = [&](const ElasticParams &p) {
        starts.push_back({&general, {p.C, p.psi0.real(), p.psi0.imag(), p.psi1.real(), p.psi1.imag()}});
    };
    for (const auto &p : opt.starts) add_general(p);
    const double t = std::tan(std::numbers::pi / static_cast<double>(N));
    const ElasticParams ngon{2.0 * (1.0 + t * t), mu, t, t * std::polar(1.0, -mu)};
    if (opt.cls != ElasticClass::FigureEight) add_general(ngon);
    for (double a = 0.01; a < 1.2; a += 0.02)
        for (double C = 0.1; C < 4.0; C += 0.05) {
            if (opt.cls == ElasticClass::FigureEight) starts.push_back({&eight, {C, a}});
            else if (opt.cls == ElasticClass::Convex) starts.push_back({&convex, {C, a}});
            else add_general({C, mu, a, -a * std::polar(1.0, -mu)});
        }
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uC(0.0, 4.0), uz(-1.0, 1.0);
    for (int i = 0; i < opt.random_starts; ++i) {
        const double C = uC(rng), a = uz(rng), b = uz(rng), c = uz(rng), d = uz(rng);
        if (opt.cls == ElasticClass::Any) add_general({C, mu, {a, b}, {c, d}});
        else starts.push_back({opt.cls == ElasticClass::Convex ? &convex : &eight, {C, std::abs(a)}});
    }

    ClosureResult best;
    best.gap = std::numeric_limits<double>::infinity();
    for (auto &[P, x] : starts) {
        double f = pattern_search(*P, x, N);
        if (f < 1e-1) f = polish(*P, x, N);
        ClosureResult r;
        r.params = P->map(x);
        r.gap = std::sqrt(f);
        classify(r, N);
        const bool ok = class_matches(r, opt.cls);
        if (ok && r.gap < best.gap) best = r;
        if (ok && r.gap < opt.tol) break;
    }
    if (!std::isfinite(best.gap)) {
        best.params = ngon;
        best.gap = closure_gap(ngon, N);
        classify(best, N);
    }
    best.closed = best.gap < opt.tol;
    best.curve = closed_curve_from_curvature(elastic_curvature_sequence(best.params, N).psi);
    best.curve.closed = best.closed;
    return best;
}

RigidCertificate certify_rigid(const DiscreteCurve &c, FlowMode mode, const CertifyParams &p) {
    if (!c.closed) throw DomainError("certify_rigid requires a closed curve");
    RigidCertificate out;
    const ComplexCurvature k0 = complex_curvature(c);
    if (mode == FlowMode::Semidiscrete) {
        if (!(p.dt > 0) || !(p.tau > 0)) throw DomainError("certify_rigid: tau and dt must be positive");
        const int steps = std::max(1, static_cast<int>(std::lround(p.tau / p.dt)));
        IntegrateOptions o;
        o.record_every = 1 << 30;
        const auto res = integrate({c, 0.0}, p.tau / steps, steps, o);
        if (!res.ok) throw SingularityError(res.error);
        out.evolved = res.state.curve;
        const auto R = dnlse_rhs(k0);
        const cplx I(0.0, 1.0);
        double num = 0, den = 0, pmax = 0;
        for (std::size_t n = 0; n < k0.size(); ++n) {
            num += std::real(std::conj(I * k0.psi[n]) * R[n]);
            den += std::norm(k0.psi[n]);
            pmax = std::max(pmax, std::abs(k0.psi[n]));
        }
        const double omega = den > 0 ? num / den : 0.0;
        double worst = 0;
        for (std::size_t n = 0; n < k0.size(); ++n) worst = std::max(worst, std::abs(R[n] - I * omega * k0.psi[n]));
        out.stationarity = pmax > 0 ? worst / pmax : worst;
        out.theta = omega * p.tau / 2.0;
    } else {
        out.evolved = dd_step(c, p.dd);
        const ComplexCurvature k1 = complex_curvature(out.evolved);
        cplx s = 0.0;
        for (std::size_t n = 0; n < k0.size(); ++n) s += k1.psi[n] * std::conj(k0.psi[n]);
        out.theta = std::abs(s) > 0 ? std::arg(s) / 2.0 : 0.0;
    }
    const RigidFit fit = fit_rigid_motion(c, out.evolved);
    out.rmsd = fit.rmsd;
    out.motion = fit.motion;
    return out;
}

}  // namespace hashi
