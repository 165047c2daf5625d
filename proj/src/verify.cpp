#include "hashi/verify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "hashi/backlund.hpp"
#include "hashi/ddflow.hpp"
#include "hashi/semiflow.hpp"

namespace hashi {

bool VerifyReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck &c) { return c.pass || c.skipped; });
}

std::string VerifyReport::table() const {
    std::string out = fmt::format("{:<26} {:>12} {:>10}  {}\n", "check", "value", "tol", "result");
    for (const auto &c : checks) {
        const char *r = c.skipped ? "skip" : c.pass ? "PASS" : "FAIL";
        out += fmt::format("{:<26} {:>12.3e} {:>10.1e}  {}", c.name, c.value, c.tol, r);
        if (!c.note.empty()) out += "  (" + c.note + ")";
        out += "\n";
    }
    out += all_pass() ? "all checks passed\n" : "some checks FAILED\n";
    return out;
}

namespace {

double max_dist(const std::vector<Quat> &a, const std::vector<Quat> &b) {
    double d = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) d = std::max(d, (a[i] - b[i]).norm());
    return d;
}

}  // namespace

VerifyReport run_verify(const DiscreteCurve &c) {
    VerifyReport rep;
    auto add = [&](const std::string &name, double tol, const std::function<double()> &f) {
        VerifyCheck ch{name, 0.0, tol, false, false, {}};
        try {
            ch.value = f();
            ch.pass = ch.value <= tol;
        } catch (const std::exception &e) {
            ch.note = e.what();
        }
        rep.checks.push_back(ch);
    };
    auto skip = [&](const std::string &name, const std::string &why) {
        rep.checks.push_back({name, 0.0, 0.0, false, true, why});
    };

    std::vector<Quat> S;
    try {
        S = tangents(c);
    } catch (const std::exception &e) {
        rep.checks.push_back({"regular", 1.0, 0.0, false, false, e.what()});
        return rep;
    }
    rep.checks.push_back({"regular", 0.0, 0.0, true, false, {}});
    const double s = total_length(c) / static_cast<double>(S.size());
    const bool arc = edge_length_deviation(c, s) <= 1e-9 * s;
    add("arclength", 1e-9, [&] { return edge_length_deviation(c, s) / s; });

    if (arc) {
        add("frame_reconstruction", 1e-9, [&] {
            const auto k = complex_curvature(c);
            const DiscreteCurve r = curve_from_curvature(k.psi, Quat{}, default_seed(c));
            std::vector<Quat> scaled;
            for (std::size_t i = 0; i < c.size(); ++i) scaled.push_back(c[0] + s * r[i]);
            return max_dist(scaled, c.vertices) / s;
        });
    } else {
        skip("frame_reconstruction", "edges not uniform");
    }
    add("sym_formula", 1e-12, [&] {
        double d = 0, scale = 1;
        for (std::size_t k = 0; k <= S.size() && k < c.size(); ++k) {
            d = std::max(d, (sym_point(S, k) - (c[k] - c[0])).norm());
            scale = std::max(scale, (c[k] - c[0]).norm());
        }
        return d / scale;
    });
    add("lax_pair", 1e-9, [&] { return std::max(lax_residual(c, 0.7), lax_residual(c, -1.3)); });
    add("serial_parallel", 1e-15, [&] {
        return max_dist(hashimoto_velocity(c, Exec::Serial), hashimoto_velocity(c, Exec::Parallel));
    });
    add("semidiscrete_drift", 1e-6, [&] {
        IntegrateOptions o;
        o.record_every = 1 << 30;
        const auto r = integrate({c, 0.0}, 1e-3, 200, o);
        if (!r.ok) throw SingularityError(r.error);
        return r.max_drift / s;
    });
    if (c.closed && arc) {
        add("dnlse_equivalence", 1e-3, [&] {
            const DiscreteCurve u{[&] {
                std::vector<Quat> v;
                for (const auto &p : c.vertices) v.push_back((1.0 / s) * p);
                return v;
            }(), true};
            return verify_equivalence(u, 1e-6).residual;
        });
    } else {
        skip("dnlse_equivalence", "needs a closed arclength curve");
    }
    add("backlund_zero_curvature", 1e-10, [&] {
        DressParamsGeometric g;
        g.l = s;
        g.delta1 = 0.6;
        Quat n = cross(S[0], Quat{0, 0, 0, 1});
        if (n.norm() < 1e-3 * s) n = cross(S[0], Quat{0, 1, 0, 0});
        g.v0 = (s / n.norm()) * n;
        return backlund_geometric(c, g).max_zero_curvature / (s * s);
    });

    if (c.closed && arc) {
        DDParams p;
        p.l = s;
        DDStepResult step;
        bool ok = true;
        add("dd_fixed_point", 1e-10, [&] {
            const auto m = sweep_monodromy(c, p);
            const auto ch = select_fixed_point(m, c, p);
            if (ch.all_fixed) return 0.0;
            const ExtC z = gauged_chart(ch.v0, p.l);
            return chordal(mobius_apply(m.M, z), z);
        });
        add("dd_step", 0.0, [&] {
            try {
                step = dd_step_detail(c, p);
            } catch (...) {
                ok = false;
                throw;
            }
            return 0.0;
        });
        if (ok) {
            add("dd_edge_lengths", 1e-11, [&] { return edge_length_deviation(step.curve, s) / s; });
            add("dd_closure", 1e-10, [&] { return step.closure_gap / s; });
            add("dd_al_consistency", 1e-8, [&] {
                return al_consistency(complex_curvature(c), complex_curvature(step.curve)).residual;
            });
        }
    } else {
        for (const char *n : {"dd_fixed_point", "dd_step", "dd_edge_lengths", "dd_closure", "dd_al_consistency"})
            skip(n, "needs a closed arclength curve");
    }
    return rep;
}

}  // namespace hashi
