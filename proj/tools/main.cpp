// hashi command-line front end.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <iostream>
#include <numbers>

#include "hashi/backlund.hpp"
#include "hashi/ddflow.hpp"
#include "hashi/elastic.hpp"
#include "hashi/io.hpp"
#include "hashi/semiflow.hpp"
#include "hashi/server.hpp"
#include "hashi/verify.hpp"

using namespace hashi;

namespace {

cplx to_cplx(const std::vector<double> &v) { return {v.at(0), v.at(1)}; }

void emit(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") std::cout << text;
    else write_text_file(path, text);
}

int default_port() {
    if (const char *p = std::getenv("HASHI_PORT")) {
        try {
            return std::stoi(p);
        } catch (...) {
            throw CLI::ValidationError("HASHI_PORT", std::string("not a port number: ") + p);
        }
    }
    return 8080;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"hashi: discrete Hashimoto flows, Baecklund transforms and elastic curves"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "seed for every stochastic search")->capture_default_str();

    std::string in, out;

    auto *curv = app.add_subcommand("curvature", "complex curvature of a curve as CSV");
    curv->add_option("--in", in, "curve JSON")->required();
    curv->add_option("--out", out, "CSV output (default stdout)");

    double dt = 1e-3;
    int steps = 100, record_every = 1;
    std::string scheme = "rk4";
    bool renorm = false;
    auto *semi = app.add_subcommand("evolve-semidiscrete", "integrate the semi-discrete flow");
    semi->add_option("--in", in, "curve JSON")->required();
    semi->add_option("--out", out, "sheet JSON")->required();
    semi->add_option("--dt", dt)->capture_default_str();
    semi->add_option("--steps", steps)->capture_default_str()->check(CLI::NonNegativeNumber);
    semi->add_option("--scheme", scheme)->check(CLI::IsMember({"rk4", "midpoint"}))->capture_default_str();
    semi->add_option("--record-every", record_every)->capture_default_str()->check(CLI::PositiveNumber);
    semi->add_flag("--renormalize", renorm, "reset edge lengths after every step");

    std::vector<double> lambda0, s0, v0;
    double l = 1.0, delta1 = std::numbers::pi / 2 - 0.1;
    std::string branch = "principal";
    bool periodic = false, geom = false;
    auto *bl = app.add_subcommand("backlund", "dress a curve (algebraic or geometric parameters)");
    bl->add_option("--in", in, "curve JSON")->required();
    bl->add_option("--out", out, "curve JSON (the dressing state goes to <out>.state.json)")->required();
    auto *o_l0 = bl->add_option("--lambda0", lambda0, "re,im")->delimiter(',')->expected(2);
    bl->add_option("--s0", s0, "re,im")->delimiter(',')->expected(2);
    bl->add_flag("--periodic", periodic, "take s0 from a monodromy eigenvector");
    auto *o_geom = bl->add_flag("--geom", geom, "geometric parameters --l --delta1 --branch --v0");
    auto *o_v0 = bl->add_option("--v0", v0, "x,y,z (geometric mode)")->delimiter(',')->expected(3)->needs(o_geom);
    bl->add_option("--l", l, "offset length (geometric mode)")->capture_default_str();
    bl->add_option("--delta1", delta1, "fold angle (geometric mode)")->capture_default_str();
    bl->add_option("--branch", branch)->check(CLI::IsMember({"principal", "reflected"}))->capture_default_str();
    o_l0->excludes(o_geom);

    bool al_check = false;
    auto *dd = app.add_subcommand("ddflow", "doubly discrete flow surface");
    dd->add_option("--in", in, "closed curve JSON")->required();
    dd->add_option("--out", out, "sheet JSON")->required();
    dd->add_option("--delta1", delta1)->capture_default_str();
    dd->add_option("--steps", steps)->capture_default_str()->check(CLI::NonNegativeNumber);
    dd->add_option("--branch", branch)->check(CLI::IsMember({"principal", "reflected"}))->capture_default_str();
    dd->add_flag("--al-check", al_check, "fit the Ablowitz-Ladik relation for every step");

    std::size_t N = 24;
    double C = 0.0, mu = 0.0;
    std::vector<double> psi0{0.0, 0.0}, psi1{0.0, 0.0};
    bool closure = false;
    std::string cls = "any";
    int random_starts = 0;
    auto *el = app.add_subcommand("elastic-gen", "discrete elastic curves");
    el->add_option("--N", N, "number of vertices")->capture_default_str()->check(CLI::Range(3, 1000000));
    el->add_option("--C", C);
    el->add_option("--mu", mu)->capture_default_str();
    el->add_option("--psi0", psi0, "re,im")->delimiter(',')->expected(2);
    el->add_option("--psi1", psi1, "re,im")->delimiter(',')->expected(2);
    el->add_flag("--closure", closure, "search closing parameters instead");
    el->add_option("--class", cls)->check(CLI::IsMember({"any", "convex", "eight"}))->capture_default_str();
    el->add_option("--random-starts", random_starts)->capture_default_str();
    el->add_option("--out", out, "curve JSON (parameters go to <out>.params.json)")->required();

    auto *ver = app.add_subcommand("verify", "run the invariant suite on a curve");
    ver->add_option("--in", in, "curve JSON")->required();

    auto *mesh = app.add_subcommand("export-mesh", "sheet JSON to OBJ");
    mesh->add_option("--in", in, "sheet JSON")->required();
    mesh->add_option("--out", out, "OBJ file")->required();

    int port = -1;
    std::string host = "127.0.0.1";
    auto *srv = app.add_subcommand("serve", "HTTP control service");
    srv->add_option("--port", port, "default from HASHI_PORT, else 8080");
    srv->add_option("--host", host)->capture_default_str();
    srv->add_option("--in", in, "initial curve (default: regular 12-gon)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const Branch br = branch == "reflected" ? Branch::Reflected : Branch::Principal;
    try {
        if (*curv) {
            emit(out, curvature_csv(complex_curvature(read_curve(in))));
        } else if (*semi) {
            IntegrateOptions o;
            o.scheme = scheme == "midpoint" ? Scheme::Midpoint : Scheme::RK4;
            o.record_every = record_every;
            o.renormalize = renorm;
            const auto r = integrate({read_curve(in), 0.0}, dt, steps, o);
            write_json_file(out, sheet_to_json(r.sheet));
            fmt::print("rows {}  max edge drift {:.3e}\n", r.sheet.num_rows(), r.max_drift);
            if (!r.ok) {
                fmt::print(stderr, "stopped early: {}\n", r.error);
                return 1;
            }
        } else if (*bl) {
            const DiscreteCurve c = read_curve(in);
            if (!lambda0.empty()) {
                DressParamsAlgebraic a{to_cplx(lambda0), 0.0};
                if (!s0.empty() && !periodic) {
                    a.s0 = to_cplx(s0);
                } else {
                    const auto pp = periodic_dress_params(c, a.lambda0);
                    if (pp.s0.empty()) throw DomainError("no finite monodromy eigenvector");
                    a.s0 = pp.s0.front();
                }
                const auto r = dress(c, a);
                write_json_file(out, curve_to_json(r.curve));
                write_json_file(out + ".state.json", dress_state_to_json(r.state));
                fmt::print("s0 = {:.12g}{:+.12g}i  periodicity defect {:.3e}\n", a.s0.real(), a.s0.imag(),
                           r.periodicity_defect);
            } else if (geom) {
                if (v0.empty()) throw CLI::ValidationError("--v0", "geometric mode needs --v0");
                DressParamsGeometric g;
                g.l = l;
                g.delta1 = delta1;
                g.branch = br;
                g.v0 = Quat{0.0, v0[0], v0[1], v0[2]};
                const auto r = backlund_geometric(c, g);
                write_json_file(out, curve_to_json(r.curve));
                write_json_file(out + ".state.json", dress_state_to_json(r.state));
                fmt::print("closure gap {:.3e}  zero-curvature residual {:.3e}\n", r.closure_gap, r.max_zero_curvature);
            } else {
                throw CLI::ValidationError("backlund", "give --lambda0 or --geom");
            }
        } else if (*dd) {
            const DiscreteCurve c = read_curve(in);
            DDParams p;
            p.delta1 = delta1;
            p.branch = br;
            if (c.num_edges() > 0) p.l = total_length(c) / static_cast<double>(c.num_edges());
            SurfaceSheet sh;
            sh.kind = "ddflow";
            sh.params["delta1"] = p.delta1;
            sh.params["l"] = p.l;
            sh.push(c, 0.0);
            DiscreteCurve cur = c;
            double worst_al = 0;
            for (int i = 0; i < steps; ++i) {
                const auto st = dd_step_detail(cur, p);
                if (st.first.warning || st.second.warning) fmt::print(stderr, "step {}: fixed point far from -S_(N-1)\n", i);
                if (st.first.collision || st.second.collision) fmt::print(stderr, "step {}: fixed points nearly coincide\n", i);
                if (al_check) {
                    const auto r = al_consistency(complex_curvature(cur), complex_curvature(st.curve));
                    worst_al = std::max(worst_al, r.residual);
                    fmt::print("step {}  al residual {:.3e}  alpha+ {:.6g}{:+.6g}i  alpha0 {:.6g}{:+.6g}i  alpha- {:.6g}{:+.6g}i\n",
                               i, r.residual, r.alpha_plus.real(), r.alpha_plus.imag(), r.alpha_0.real(),
                               r.alpha_0.imag(), r.alpha_minus.real(), r.alpha_minus.imag());
                }
                cur = st.curve;
                sh.push(cur, static_cast<double>(i + 1));
            }
            write_json_file(out, sheet_to_json(sh));
            fmt::print("rows {}  edge deviation {:.3e}\n", sh.num_rows(), edge_length_deviation(cur, p.l));
            if (al_check && worst_al > 1e-8) {
                fmt::print(stderr, "al check failed: worst residual {:.3e}\n", worst_al);
                return 1;
            }
        } else if (*el) {
            ElasticParams p;
            json side;
            if (closure) {
                ClosureOptions o;
                o.cls = cls == "convex" ? ElasticClass::Convex : cls == "eight" ? ElasticClass::FigureEight : ElasticClass::Any;
                o.seed = seed;
                o.random_starts = random_starts;
                const auto r = closure_search(N, mu, o);
                p = r.params;
                write_json_file(out, curve_to_json(r.curve));
                side = {{"closed", r.closed}, {"gap", r.gap}, {"turning", r.turning}, {"sign_changes", r.sign_changes}};
                fmt::print("gap {:.3e}  {}\n", r.gap, r.closed ? "closed" : "NOT closed");
                if (!r.closed) {
                    side.update({{"C", p.C}, {"mu", p.mu}});
                    write_json_file(out + ".params.json", side);
                    return 1;
                }
            } else {
                p = ElasticParams{C, mu, to_cplx(psi0), to_cplx(psi1)};
                const auto k = elastic_curvature_sequence(p, N);
                write_json_file(out, curve_to_json(curve_from_curvature(k.psi)));
                side = {{"recurrence_residual", recurrence_residual(k, C, mu)}};
            }
            side.update({{"C", p.C},
                         {"mu", p.mu},
                         {"psi0", {p.psi0.real(), p.psi0.imag()}},
                         {"psi1", {p.psi1.real(), p.psi1.imag()}},
                         {"N", N}});
            write_json_file(out + ".params.json", side);
        } else if (*ver) {
            const auto rep = run_verify(read_curve(in));
            std::cout << rep.table();
            return rep.all_pass() ? 0 : 1;
        } else if (*mesh) {
            export_obj(read_sheet(in), out);
        } else if (*srv) {
            Session session(in.empty() ? regular_polygon(12) : read_curve(in));
            HttpService http(session);
            const int p = port >= 0 ? port : default_port();
            const int bound = http.bind(host, p);
            if (bound < 0) {
                fmt::print(stderr, "cannot bind {}:{}\n", host, p);
                return 1;
            }
            fmt::print("listening on http://{}:{}\n", host, bound);
            std::fflush(stdout);
            return http.run() ? 0 : 1;
        }
    } catch (const CLI::Error &e) {
        fmt::print(stderr, "{}\n", e.what());
        return 2;
    } catch (const std::exception &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
