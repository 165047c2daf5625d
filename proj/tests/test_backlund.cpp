#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "common.hpp"
#include "hashi/backlund.hpp"

using namespace hashi;
using hashi::testing::random_closed_curve;
using hashi::testing::random_open_curve;
using hashi::testing::random_unit;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I1{0.0, 1.0};

DiscreteCurve line(int lo, int hi) {
    DiscreteCurve c;
    for (int n = lo; n <= hi; ++n) c.vertices.push_back(Quat::vec(n, 0, 0));
    return c;
}

double mat_dist(const Mat2 &a, const Mat2 &b) { return (a - b).norm(); }

// Signed angle around p->q from the half plane through a to the half plane through b.
double dihedral(const Quat &p, const Quat &q, const Quat &a, const Quat &b) {
    const Quat d = (q - p) / (q - p).norm();
    Quat ra = a - p, rb = b - p;
    ra -= dot(ra, d) * d;
    rb -= dot(rb, d) * d;
    return std::atan2(dot(cross(ra, rb), d), dot(ra, rb));
}

double wrap_pi(double a) { return std::remainder(a, 2 * pi); }

// Fold family: points x with |x - S| = l and |x - v| = s, i.e. g~_+ = S + v_+.
// Picks the member whose dihedral along S equals target.
Quat fold_oracle(const Quat &S, const Quat &v, double target) {
    const double s = S.norm(), l = v.norm();
    const Quat e0 = v - S;
    const double d = e0.norm();
    const Quat e = e0 / d;
    const double a = (l * l - s * s + d * d) / (2 * d);
    const double h = std::sqrt(std::max(0.0, l * l - a * a));
    const Quat c = S + a * e;
    Quat u = cross(e, Quat::vec(1, 0, 0));
    if (u.norm() < 0.5) u = cross(e, Quat::vec(0, 1, 0));
    u = u / u.norm();
    const Quat w = cross(e, u);
    auto pt = [&](double phi) { return c + h * (std::cos(phi) * u + std::sin(phi) * w); };
    auto f = [&](double phi) { return wrap_pi(dihedral(Quat{}, S, v, pt(phi)) - target); };
    const int M = 720;
    Quat best;
    double best_res = 1e300;
    for (int i = 0; i < M; ++i) {
        double lo = 2 * pi * i / M, hi = 2 * pi * (i + 1) / M;
        double flo = f(lo), fhi = f(hi);
        if (flo * fhi > 0 || std::abs(flo - fhi) > 1.0) continue;
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi), fm = f(mid);
            if ((fm < 0) == (flo < 0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        const double r = std::abs(f(0.5 * (lo + hi)));
        if (r < best_res) {
            best_res = r;
            best = pt(0.5 * (lo + hi));
        }
    }
    return best - S;
}

// (a, b) of the dressed straight line at vertex n, vertex 0 carrying G = 1.
std::pair<cplx, cplx> dressed_line_ab(int n, cplx lambda0, cplx s0) {
    const cplx p = std::pow(1.0 + I1 * lambda0, n), q = std::pow(1.0 - I1 * lambda0, n);
    const cplx pb = std::conj(p), qb = std::conj(q), lb = std::conj(lambda0);
    const double s2 = std::norm(s0);
    const cplx den = pb / qb + s2 * q / p;
    const cplx a = -((1.0 / lambda0) * pb / qb + s2 / lb * q / p) / den;
    const cplx b = std::conj(s0) * (1.0 / lb - 1.0 / lambda0) / den;
    return {a, b};
}

}  // namespace

TEST_CASE("frame_at") {
    const auto c = line(0, 12);
    for (cplx lam : {cplx(0.3, -0.2), cplx(0, -0.4), cplx(1.5, 0.1)}) {
        const auto G = frame_at(c, lam);
        REQUIRE(G.size() == c.size());
        for (std::size_t n = 0; n < G.size(); ++n) {
            const Mat2 want{std::pow(1.0 + I1 * lam, static_cast<double>(n)), 0.0, 0.0,
                            std::pow(1.0 - I1 * lam, static_cast<double>(n))};
            CHECK(mat_dist(G[n], want) < 1e-12 * (1 + want.norm()));
        }
    }
    std::mt19937_64 rng(41);
    const auto r = random_closed_curve(14, rng);
    for (const auto &g : frame_at(r, 0.0)) CHECK(mat_dist(g, Mat2::identity()) == 0.0);
    const cplx lam(0.7, 0.3);
    const auto G = frame_at(r, lam, 5);
    CHECK(G.size() == 15);
    CHECK(mat_dist(G[5], Mat2::identity()) == 0.0);
    for (std::size_t n = 0; n < G.size(); ++n) {
        const cplx want = std::pow(1.0 + lam * lam, static_cast<double>(n) - 5.0);
        CHECK(std::abs(G[n].det() - want) < 1e-11 * std::abs(want));
    }
    CHECK_THROWS_AS(frame_at(r, lam, 15), DomainError);
}

TEST_CASE("dressed straight line matches the closed form") {
    const auto c = line(-20, 20);
    for (cplx lambda0 : {cplx(0.4, -0.4), cplx(0, -0.4)}) {
        const cplx s0(0.5, 1.0);
        const auto d = dress(c, {lambda0, s0}, 20);
        for (int n = -20; n <= 20; ++n) {
            const auto [a, b] = dressed_line_ab(n, lambda0, s0);
            const Quat want{a.real(), a.imag(), b.imag(), -b.real()};
            CHECK((d.state.rho[static_cast<std::size_t>(n + 20)] - want).norm() < 1e-10);
        }
        CHECK(edge_length_deviation(d.curve, 1.0) < 1e-12);
    }
    // lambda0 = -0.4 i: the dressed line is planar
    const auto d = dress(c, {cplx(0, -0.4), cplx(0.5, 1.0)}, 20);
    Quat nrm;
    for (std::size_t i = 1; i + 1 < d.curve.size() && nrm.norm() < 1e-3; ++i)
        nrm = cross(d.curve[i] - d.curve[0], d.curve[i + 1] - d.curve[0]);
    nrm = nrm / nrm.norm();
    double off = 0;
    for (const auto &p : d.curve.vertices) off = std::max(off, std::abs(dot(p - d.curve[0], nrm)));
    CHECK(off < 1e-9);
    // and the other one is not
    const auto d2 = dress(c, {cplx(0.4, -0.4), cplx(0.5, 1.0)}, 20);
    double off2 = 0;
    nrm = cross(d2.curve[19] - d2.curve[20], d2.curve[21] - d2.curve[20]);
    nrm = nrm / nrm.norm();
    for (const auto &p : d2.curve.vertices) off2 = std::max(off2, std::abs(dot(p - d2.curve[20], nrm)));
    CHECK(off2 > 1e-3);
}

TEST_CASE("dress invariants") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> n;
    for (int t = 0; t < 20; ++t) {
        const auto c = t % 2 ? random_closed_curve(16, rng) : random_open_curve(16, rng);
        const cplx lambda0(n(rng), 0.2 + std::abs(n(rng)));
        const cplx s0(n(rng), n(rng));
        const auto d = dress(c, {lambda0, s0});
        const auto &rho = d.state.rho;
        const double r0 = rho[0].w, m0 = rho[0].imag().norm();
        for (std::size_t k = 0; k < c.size(); ++k) {
            CHECK(std::abs(rho[k].w - r0) < 1e-11);
            CHECK(std::abs(rho[k].imag().norm() - m0) < 1e-11);
            CHECK(std::abs((d.curve[k] - c[k]).norm() - m0) < 1e-12);
        }
        // the closing edge of a closed curve is only preserved for periodic parameters
        const auto S = edges_unchecked(c), St = edges_unchecked(d.curve);
        for (std::size_t k = 0; k + 1 < c.size(); ++k) CHECK(std::abs(St[k].norm() - S[k].norm()) < 1e-12);
        // nu = -1/lambda0 and Im nu = |v|
        CHECK(std::abs(d.state.nu + 1.0 / lambda0) < 1e-15);
        CHECK(std::abs(r0 - d.state.nu.real()) < 1e-11);
        CHECK(std::abs(m0 - std::abs(d.state.nu.imag())) < 1e-11);

        const auto ds = dress(c, {lambda0, s0}, 0, Exec::Serial);
        for (std::size_t k = 0; k < c.size(); ++k) CHECK((ds.state.rho[k] - rho[k]).norm() == 0.0);
    }
    CHECK_THROWS_AS(dress(line(0, 5), {cplx(0.5, 0.0), cplx(1, 0)}), DomainError);
}

TEST_CASE("dressing singularity") {
    // lambda0 = i kills the first component of 1 + lambda0 I, so w_1 = 0 for s0 = 0
    const auto c = line(0, 4);
    CHECK_THROWS_AS(dress(c, {cplx(0, 1), cplx(0, 0)}), DressingSingularity);
}

TEST_CASE("edge_coupling and mobius_of_edge") {
    const auto ec = edge_coupling(1, 1, pi / 2, Branch::Principal);
    CHECK(std::abs(ec.k - 1.0) < 1e-15);
    CHECK(std::abs(ec.nu - I1) < 1e-15);
    CHECK(std::abs(ec.delta2 - pi / 2) < 1e-7);

    const auto e2 = edge_coupling(2.0, 0.7, 0.9, Branch::Principal);
    CHECK(std::abs(std::sin(e2.delta2) - 0.7 / 2.0 * std::sin(0.9)) < 1e-15);
    CHECK(std::abs(e2.k - std::tan(0.45) * std::tan(e2.delta2 / 2)) < 1e-15);
    const auto e3 = edge_coupling(2.0, 0.7, 0.9, Branch::Reflected);
    CHECK(std::abs(e3.delta2 - (pi - e2.delta2)) < 1e-15);

    CHECK(edge_coupling(1, 1, 0.0, Branch::Principal).identity);
    CHECK_THROWS_AS(edge_coupling(1, 2, 1.2, Branch::Principal), BranchError);
    CHECK_THROWS_AS(edge_coupling(0, 2, 1.2, Branch::Principal), DomainError);

    // M / nu = U(lambda) at lambda = -1/nu
    std::mt19937_64 rng(43);
    const Quat S = random_unit(rng);
    const Mat2 M = mobius_of_edge(S, 0.8, 1.1);
    const cplx nu = edge_coupling(1, 0.8, 1.1, Branch::Principal).nu;
    const Mat2 U = Mat2::identity() + (-1.0 / nu) * to_matrix(S);
    CHECK(mat_dist((1.0 / nu) * M, U) < 1e-14);
}

TEST_CASE("propagate_v against the fold-family oracle") {
    {
        const auto r = propagate_v(kI, kJ, pi / 2);
        const Quat o = fold_oracle(kI, kJ, pi / 2 - 1e-9);
        CHECK((r.v_plus - o).norm() < 1e-7);
        CHECK(std::abs(r.v_plus.norm() - 1.0) < 1e-15);
        CHECK(std::abs(r.S_tilde.norm() - 1.0) < 1e-15);
    }
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int t = 0; t < 300; ++t) {
        const double s = 0.5 + 1.5 * u(rng);
        const double l = s * (0.1 + 0.9 * u(rng));
        const Quat S = s * random_unit(rng), v = l * random_unit(rng);
        double d1 = (u(rng) - 0.5) * 0.98 * pi;
        if (std::abs(d1) < 0.05) continue;
        for (Branch br : {Branch::Principal, Branch::Reflected}) {
            PropagateResult r;
            try {
                r = propagate_v(S, v, d1, br);
            } catch (const BranchError &) {
                continue;
            }
            const double target = br == Branch::Principal ? d1 : d1 - pi * (d1 > 0 ? 1 : -1);
            CHECK(std::abs(wrap_pi(dihedral(Quat{}, S, v, S + r.v_plus) - target)) < 1e-9);
            const Quat o = fold_oracle(S, v, target);
            CHECK((r.v_plus - o).norm() < 1e-9 * l);
            CHECK(std::abs(r.v_plus.norm() - l) < 1e-12);
            CHECK(std::abs(r.S_tilde.norm() - s) < 1e-12);
            ++checked;
        }
    }
    CHECK(checked > 300);

    CHECK_THROWS_AS(propagate_v(kI, 2.0 * kI, 0.4), DomainError);
    CHECK_THROWS_AS(propagate_v(kI, Quat{}, 0.4), DomainError);
    CHECK_THROWS_AS(propagate_v(kI, 1.5 * kJ, 1.3), BranchError);
}

TEST_CASE("delta = pi: cross-ratio tends to l^2") {
    std::mt19937_64 rng(45);
    for (double l : {0.3, 0.7, 1.0}) {
        const Quat S = random_unit(rng), v = l * random_unit(rng);
        const auto r = propagate_v(S, v, pi - 1e-7);
        const Quat g{}, gt = v, gtp = S + r.v_plus, gp = S;
        const Quat cr = (g - gt) * (gt - gtp).inv() * (gtp - gp) * (gp - g).inv();
        CHECK(std::abs(cr.w - l * l) < 1e-6);
        CHECK(cr.imag().norm() < 1e-6);
        CHECK(std::abs(r.coupling.k - l) < 1e-6);
    }
}

TEST_CASE("chart commutation on random configurations") {
    std::mt19937_64 rng(46);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int done = 0;
    double worst = 0;
    while (done < 1000) {
        const double s = 0.5 + 1.5 * u(rng), l = 0.2 + 1.8 * u(rng);
        const Quat S = s * random_unit(rng), v = l * random_unit(rng);
        const double d1 = (u(rng) - 0.5) * 2 * pi;
        const Branch br = done % 2 ? Branch::Reflected : Branch::Principal;
        PropagateResult r;
        try {
            r = propagate_v(S, v, d1, br);
        } catch (const DomainError &) {
            continue;
        }
        const ExtC z = mobius_apply(mobius_of_edge(S, l, d1, br), gauged_chart(v, l));
        const Quat w = gauged_unchart(z, l);
        worst = std::max(worst, (w - r.v_plus).norm() / l);
        ++done;
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("zero_curvature_check") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const Quat S = (0.5 + u(rng)) * random_unit(rng), v = 0.4 * random_unit(rng);
        const double d1 = (u(rng) - 0.5) * 3.0;
        const auto r = propagate_v(S, v, d1);
        const cplx nu = r.coupling.nu;
        CHECK(zero_curvature_check(S, v, r.v_plus, r.S_tilde, nu) < 1e-10);
        const Quat re = Quat::real(nu.real());
        CHECK((r.S_tilde * (re + v) - (re + r.v_plus) * S).norm() < 1e-12);
        CHECK((r.S_tilde + v - r.v_plus - S).norm() < 1e-15);
        // a wrong Re nu leaves 0.1 (v+ - v) in the constant term
        CHECK(zero_curvature_check(S, v, r.v_plus, r.S_tilde, nu + 0.1) > 0.099 * (r.v_plus - v).norm());
    }
}

TEST_CASE("backlund_geometric") {
    std::mt19937_64 rng(48);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        const auto c = t % 2 ? random_closed_curve(20, rng) : random_open_curve(20, rng);
        DressParamsGeometric p;
        p.l = 0.3 + 0.6 * u(rng);
        p.delta1 = 0.3 + 1.0 * u(rng);
        p.v0 = p.l * random_unit(rng);
        const auto b = backlund_geometric(c, p);
        CHECK(b.max_zero_curvature < 1e-10);
        for (const auto &v : b.state.v) CHECK(std::abs(v.norm() - p.l) < 1e-12);
        const auto S = edges_unchecked(c), St = edges_unchecked(b.curve);
        for (std::size_t k = 0; k + 1 < c.size(); ++k) CHECK(std::abs(St[k].norm() - S[k].norm()) < 1e-12);
        for (std::size_t k = 0; k < c.size(); ++k)
            CHECK((b.traktrix[k] - 0.5 * (c[k] + b.curve[k])).norm() < 1e-14);

        // the algebraic construction with matching parameters gives the same curve
        const auto a = algebraic_from_geometric(p);
        const auto d = dress(c, a);
        double gap = 0;
        for (std::size_t k = 0; k < c.size(); ++k) gap = std::max(gap, (d.curve[k] - b.curve[k]).norm());
        CHECK(gap < 1e-9);
        CHECK(std::abs(d.state.nu - b.state.nu) < 1e-12);
    }
    DressParamsGeometric bad;
    bad.l = 1.0;
    bad.v0 = 0.5 * kJ;
    CHECK_THROWS_AS(backlund_geometric(random_open_curve(5, rng), bad), DomainError);
}

TEST_CASE("bianchi") {
    std::mt19937_64 rng(49);
    std::normal_distribution<double> n;
    for (int t = 0; t < 50; ++t) {
        const Quat a{n(rng), n(rng), n(rng), n(rng)}, b{n(rng), n(rng), n(rng), n(rng)};
        const auto r = bianchi(a, b);
        for (double lam : {1.0, 0.5, -3.0}) {
            const Quat L = (Quat::real(1) + lam * r.hat_tilde) * (Quat::real(1) + lam * a);
            const Quat R = (Quat::real(1) + lam * r.tilde_hat) * (Quat::real(1) + lam * b);
            CHECK((L - R).norm() < 1e-12 * (1 + L.norm()));
        }
    }
    const Quat a{0.3, 0.5, 0, 0}, b{-0.2, 1.1, 0, 0};
    const auto r = bianchi(a, b);
    CHECK((r.hat_tilde - b).norm() < 1e-15);
    CHECK((r.tilde_hat - a).norm() < 1e-15);
    CHECK_THROWS_AS(bianchi(a, a), DomainError);

    // four-curve quadrilateral: dressing in either order gives the same composite
    for (int t = 0; t < 6; ++t) {
        const auto c = t % 2 ? random_closed_curve(18, rng) : random_open_curve(18, rng);
        const cplx lh(0.3 * n(rng), 0.4 + 0.2 * std::abs(n(rng)));
        const cplx lt(0.3 * n(rng), -0.5 - 0.2 * std::abs(n(rng)));
        const cplx sh(n(rng), n(rng)), st(n(rng), n(rng));
        const auto dh = dress(c, {lh, sh}), dt = dress(c, {lt, st});
        const auto dht = dress(dh.curve, {lt, transported_s0(dh.state.rho[0], lt, st)});
        const auto dth = dress(dt.curve, {lh, transported_s0(dt.state.rho[0], lh, sh)});
        for (std::size_t k = 0; k < c.size(); ++k) {
            CHECK((dht.curve[k] - dth.curve[k]).norm() < 1e-9);
            const auto r2 = bianchi(dh.state.rho[k], dt.state.rho[k]);
            CHECK((dht.state.rho[k] - r2.hat_tilde).norm() < 1e-9);
            CHECK((dth.state.rho[k] - r2.tilde_hat).norm() < 1e-9);
        }
    }
}

TEST_CASE("periodic_dress_params") {
    const auto c = regular_polygon(12);
    const cplx lambda0(0.3, 0.45);
    const auto pp = periodic_dress_params(c, lambda0);
    REQUIRE(pp.s0.size() == 2);
    CHECK_FALSE(pp.defective);
    for (cplx s0 : pp.s0) {
        const auto d = dress(c, {lambda0, s0});
        CHECK(d.periodicity_defect < 1e-10);
        CHECK(edge_length_deviation(d.curve, 1.0) < 1e-10);
    }
    // eigenvector scaling does not matter: the monodromy maps (1, s0) to a multiple of itself
    const auto G = frame_at(c, lambda0);
    for (cplx s0 : pp.s0)
        for (cplx scale : {cplx(2.0, 0.0), cplx(-0.3, 1.7)}) {
            const cplx w1 = scale, w2 = scale * s0;
            const cplx m1 = G.back().m11 * w1 + G.back().m12 * w2, m2 = G.back().m21 * w1 + G.back().m22 * w2;
            CHECK(std::abs(m2 / m1 - s0) < 1e-10);
        }
    const auto bad = dress(c, {lambda0, pp.s0[0] + 0.05});
    CHECK(bad.periodicity_defect > 1e-3);
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(periodic_dress_params(random_open_curve(6, rng), lambda0), DomainError);
}
