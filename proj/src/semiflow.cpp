#include "hashi/semiflow.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <string>

namespace hashi {

bool SurfaceSheet::consistent() const {
    for (const auto &r : rows)
        if (r.size() != rows.front().size() || r.closed != rows.front().closed) return false;
    return true;
}

namespace {

[[noreturn]] void singular_at(long k) {
    throw SingularityError("anti-parallel tangents at vertex " + std::to_string(k));
}

inline bool vertex_velocity(const Quat &Sm, const Quat &S, Quat &out) {
    const double den = 1.0 + dot(S, Sm);
    if (den <= 1e-12) return false;
    out = 2.0 * cross(Sm, S) / den;
    return true;
}

std::vector<Quat> velocity_from_edges(const std::vector<Quat> &S, bool closed, std::size_t nv, Exec ex) {
    std::vector<Quat> v(nv);
    const long n = static_cast<long>(nv);
    const long E = static_cast<long>(S.size());
    const long lo = closed ? 0 : 1;
    const long hi = closed ? n : n - 1;
    long bad = LONG_MAX;
    if (ex == Exec::Parallel) {
#pragma omp parallel for reduction(min : bad)
        for (long k = lo; k < hi; ++k) {
            const Quat &Sm = S[static_cast<std::size_t>((k - 1 + E) % E)];
            if (!vertex_velocity(Sm, S[static_cast<std::size_t>(k % E)], v[static_cast<std::size_t>(k)]))
                bad = std::min(bad, k);
        }
    } else {
        for (long k = lo; k < hi; ++k) {
            const Quat &Sm = S[static_cast<std::size_t>((k - 1 + E) % E)];
            if (!vertex_velocity(Sm, S[static_cast<std::size_t>(k % E)], v[static_cast<std::size_t>(k)]))
                bad = std::min(bad, k);
        }
    }
    if (bad != LONG_MAX) singular_at(bad);
    return v;
}

}  // namespace

std::vector<Quat> hashimoto_velocity(const DiscreteCurve &c, Exec ex) {
    return velocity_from_edges(tangents(c), c.closed, c.size(), ex);
}

std::vector<Quat> heisenberg_rhs(const DiscreteCurve &c, Exec ex) {
    const auto v = hashimoto_velocity(c, ex);
    const std::size_t E = c.num_edges();
    std::vector<Quat> out(E);
    for (std::size_t k = 0; k < E; ++k) out[k] = v[(k + 1) % c.size()] - v[k];
    return out;
}

namespace {

std::vector<Quat> axpy(const std::vector<Quat> &x, double a, const std::vector<Quat> &y) {
    std::vector<Quat> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + a * y[i];
    return r;
}

std::vector<Quat> vel_of(const std::vector<Quat> &pts, bool closed, Exec ex) {
    DiscreteCurve c{pts, closed};
    return velocity_from_edges(edges_unchecked(c), closed, pts.size(), ex);
}

}  // namespace

IntegrateResult integrate(const FlowState &s, double dt, int steps, const IntegrateOptions &opt) {
    if (!std::isfinite(dt) || steps < 0) throw DomainError("integrate: invalid dt or steps");
    IntegrateResult res;
    res.sheet.kind = "semidiscrete";
    res.sheet.params["dt"] = dt;
    res.sheet.params["steps"] = steps;
    res.state = s;
    tangents(s.curve);
    const bool closed = s.curve.closed;
    std::vector<double> len0;
    for (const auto &e : edges_unchecked(s.curve)) len0.push_back(e.norm());
    auto drift = [&](const std::vector<Quat> &pts) {
        DiscreteCurve c{pts, closed};
        const auto S = edges_unchecked(c);
        double d = 0;
        for (std::size_t i = 0; i < S.size(); ++i) d = std::max(d, std::abs(S[i].norm() - len0[i]));
        return d;
    };

    std::vector<Quat> x = s.curve.vertices;
    double t = s.time;
    res.sheet.push(s.curve, t);
    const int every = std::max(1, opt.record_every);
    try {
        for (int step = 0; step < steps; ++step) {
            if (opt.scheme == Scheme::RK4) {
                const auto k1 = vel_of(x, closed, opt.exec);
                const auto k2 = vel_of(axpy(x, dt / 2, k1), closed, opt.exec);
                const auto k3 = vel_of(axpy(x, dt / 2, k2), closed, opt.exec);
                const auto k4 = vel_of(axpy(x, dt, k3), closed, opt.exec);
                for (std::size_t i = 0; i < x.size(); ++i)
                    x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            } else {
                const auto k1 = vel_of(x, closed, opt.exec);
                const auto k2 = vel_of(axpy(x, dt / 2, k1), closed, opt.exec);
                for (std::size_t i = 0; i < x.size(); ++i) x[i] += dt * k2[i];
            }
            if (opt.renormalize) {
                // rebuild from vertex 0 with the initial edge lengths; on closed curves
                // the closing edge absorbs the error
                DiscreteCurve c{x, closed};
                auto S = edges_unchecked(c);
                Quat g = x[0];
                for (std::size_t i = 0; i + 1 < x.size(); ++i) {
                    x[i] = g;
                    g += S[i] * (len0[i] / S[i].norm());
                }
                x.back() = g;
            }
            t += dt;
            res.max_drift = std::max(res.max_drift, drift(x));
            if ((step + 1) % every == 0 || step + 1 == steps) res.sheet.push(DiscreteCurve{x, closed}, t);
        }
    } catch (const DomainError &e) {
        res.ok = false;
        res.error = e.what();
    }
    res.state.curve = DiscreteCurve{x, closed};
    res.state.time = t;
    return res;
}

std::vector<cplx> dnlse_rhs(const ComplexCurvature &psi, Exec ex) {
    const long n = static_cast<long>(psi.size());
    std::vector<cplx> out(static_cast<std::size_t>(n));
    const cplx I(0.0, 1.0);
    auto nb = [&](long k) -> cplx {
        if (psi.closed) return psi.at(k);
        if (k < 0 || k >= n) return 0.0;
        return psi.psi[static_cast<std::size_t>(k)];
    };
    auto body = [&](long k) {
        const cplx p = psi.psi[static_cast<std::size_t>(k)];
        const cplx pp = nb(k + 1), pm = nb(k - 1);
        out[static_cast<std::size_t>(k)] = I * (pp - 2.0 * p + pm + std::norm(p) * (pp + pm));
    };
    if (ex == Exec::Parallel) {
#pragma omp parallel for
        for (long k = 0; k < n; ++k) body(k);
    } else {
        for (long k = 0; k < n; ++k) body(k);
    }
    return out;
}

EquivalenceReport verify_equivalence(const DiscreteCurve &c, double dt) {
    const ComplexCurvature k0 = complex_curvature(c);
    IntegrateOptions opt;
    opt.record_every = 1 << 30;
    const auto fwd = integrate({c, 0.0}, dt, 1, opt);
    const auto bwd = integrate({c, 0.0}, -dt, 1, opt);
    if (!fwd.ok) throw SingularityError(fwd.error);
    if (!bwd.ok) throw SingularityError(bwd.error);
    const ComplexCurvature kp = complex_curvature(fwd.state.curve);
    const ComplexCurvature km = complex_curvature(bwd.state.curve);
    const auto R = dnlse_rhs(k0);
    const std::size_t n = k0.size();
    std::vector<cplx> D(n);
    for (std::size_t i = 0; i < n; ++i) D[i] = (kp.psi[i] - km.psi[i]) / (2.0 * dt);

    EquivalenceReport rep;
    const cplx I(0.0, 1.0);
    double num = 0, den = 0, rmax = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += std::real(std::conj(I * k0.psi[i]) * (D[i] - R[i]));
        den += std::norm(k0.psi[i]);
        rmax = std::max(rmax, std::abs(R[i]));
    }
    rep.beta = den > 0 ? num / den : 0.0;
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(D[i] - R[i] - I * rep.beta * k0.psi[i]));
    rep.residual = rmax > 0 ? worst / rmax : worst;
    return rep;
}

Quat sym_point(const std::vector<Quat> &S, std::size_t k, double lambda) {
    if (k > S.size()) throw DomainError("sym_point: index out of range");
    Quat G = Quat::real(1.0), dG;
    for (std::size_t j = 0; j < k; ++j) {
        const Quat U = Quat::real(1.0) + lambda * S[j];
        dG = S[j] * G + U * dG;
        G = U * G;
    }
    return G.inv() * dG;
}

Quat lax_V(const Quat &Sk, const Quat &Skm1, double lambda) {
    const double den = 1.0 + dot(Sk, Skm1);
    const Quat a = 2.0 * (Sk + Skm1) / den;
    const Quat b = 2.0 * cross(Sk, Skm1) / den;
    return -(1.0 / (1.0 + lambda * lambda)) * (lambda * lambda * a + lambda * b);
}

double lax_residual(const DiscreteCurve &c, double lambda) {
    const auto S = tangents(c);
    const auto Sd = heisenberg_rhs(c, Exec::Serial);
    const long E = static_cast<long>(S.size());
    auto V = [&](long k) {
        return lax_V(S[static_cast<std::size_t>((k + E) % E)], S[static_cast<std::size_t>((k - 1 + E) % E)], lambda);
    };
    const long lo = c.closed ? 0 : 1;
    const long hi = c.closed ? E : E - 1;
    double worst = 0;
    for (long k = lo; k < hi; ++k) {
        const Quat U = Quat::real(1.0) + lambda * S[static_cast<std::size_t>(k)];
        const Quat Ud = lambda * Sd[static_cast<std::size_t>(k)];
        worst = std::max(worst, (Ud - (V(k + 1) * U - U * V(k))).norm());
    }
    return worst;
}

}  // namespace hashi
