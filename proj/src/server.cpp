#include "hashi/server.hpp"

#include <mutex>

#include "hashi/backlund.hpp"
#include "hashi/ddflow.hpp"
#include "hashi/semiflow.hpp"
#include "httplib.h"

namespace hashi {

namespace {

double number(const json &b, const char *key, std::optional<double> def = std::nullopt) {
    if (!b.contains(key)) {
        if (def) return *def;
        throw FormatError(std::string("missing field \"") + key + "\"");
    }
    if (!b[key].is_number()) throw FormatError(std::string("field \"") + key + "\" must be a number");
    return b[key].get<double>();
}

long count(const json &b, const char *key, long def) {
    if (!b.contains(key)) return def;
    if (!b[key].is_number_integer()) throw FormatError(std::string("field \"") + key + "\" must be an integer");
    return b[key].get<long>();
}

cplx complex_field(const json &b, const char *key) {
    if (!b.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
    const json &v = b[key];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw FormatError(std::string("field \"") + key + "\" must be [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

double mean_edge(const DiscreteCurve &c) { return total_length(c) / static_cast<double>(c.num_edges()); }

}  // namespace

Session::Session(DiscreteCurve initial) : initial_(std::move(initial)) {
    tangents(initial_);
    curve_ = initial_;
    sheet_.push(curve_, 0.0);
}

void Session::append(const DiscreteCurve &c, const std::string &kind) {
    if (sheet_.kind.empty() || sheet_.num_rows() == 1) sheet_.kind = kind;
    else if (sheet_.kind != kind) sheet_.kind = "mixed";
    ++counter_;
    sheet_.push(c, static_cast<double>(counter_));
}

json Session::get_curve() const {
    std::shared_lock lk(mu_);
    return {{"ok", true}, {"curve", curve_to_json(curve_)}, {"step", counter_}};
}

json Session::put_curve(const json &body) {
    DiscreteCurve c = curve_from_json(body.contains("curve") ? body["curve"] : body);
    tangents(c);
    bool resampled = false;
    const double s = mean_edge(c);
    if (edge_length_deviation(c, s) > 1e-12 * s) {
        c = resample_arclength(c, c.num_edges());
        resampled = true;
    }
    const double residual = edge_length_deviation(c, mean_edge(c)) / mean_edge(c);
    std::unique_lock lk(mu_);
    curve_ = c;
    sheet_ = SurfaceSheet{};
    sheet_.push(curve_, 0.0);
    counter_ = 0;
    return {{"ok", true}, {"curve", curve_to_json(curve_)}, {"resampled", resampled}, {"residual", residual}};
}

json Session::step(const json &body) {
    DDParams p;
    p.delta1 = number(body, "delta1", p.delta1);
    const long k = count(body, "count", 1);
    if (k < 0 || k > 100000) throw FormatError("\"count\" out of range");
    std::unique_lock lk(mu_);
    if (!curve_.closed) throw DomainError("dd flow requires closed curve");
    p.l = mean_edge(curve_);
    if (edge_length_deviation(curve_, p.l) > 1e-9 * p.l)
        throw DomainError("dd flow requires an arclength curve");
    std::vector<DiscreteCurve> rows;
    DiscreteCurve cur = curve_;
    for (long i = 0; i < k; ++i) {
        cur = dd_step(cur, p);
        rows.push_back(cur);
    }
    json out_rows = json::array();
    for (const auto &r : rows) {
        append(r, "ddflow");
        out_rows.push_back(curve_to_json(r));
    }
    curve_ = cur;
    return {{"ok", true}, {"curve", curve_to_json(curve_)}, {"rows", out_rows}, {"step", counter_}};
}

json Session::backlund(const json &body) {
    DressParamsAlgebraic a;
    a.lambda0 = complex_field(body, "lambda0");
    const bool periodic = body.value("periodic", false);
    std::unique_lock lk(mu_);
    if (body.contains("s0") && !periodic) {
        a.s0 = complex_field(body, "s0");
    } else if (curve_.closed) {
        const auto pp = periodic_dress_params(curve_, a.lambda0);
        if (pp.s0.empty()) throw DomainError("no finite monodromy eigenvector for this lambda0");
        a.s0 = pp.s0.front();
    } else {
        throw FormatError("missing field \"s0\"");
    }
    const DressResult r = dress(curve_, a);
    const double scale = mean_edge(curve_);
    if (curve_.closed && r.periodicity_defect > 1e-8 * scale)
        throw DomainError("dressed curve is not closed (defect " + std::to_string(r.periodicity_defect) +
                          "); use a monodromy eigenvector s0");
    append(r.curve, "backlund");
    curve_ = r.curve;
    return {{"ok", true},
            {"curve", curve_to_json(curve_)},
            {"s0", {a.s0.real(), a.s0.imag()}},
            {"periodicity_defect", r.periodicity_defect},
            {"step", counter_}};
}

json Session::semidiscrete(const json &body) {
    const double dt = number(body, "dt");
    const long steps = count(body, "steps", 1);
    const long every = count(body, "record_every", 1);
    if (steps < 0 || steps > 1000000 || every < 1) throw FormatError("\"steps\" or \"record_every\" out of range");
    IntegrateOptions o;
    o.record_every = static_cast<int>(every);
    std::unique_lock lk(mu_);
    const auto r = integrate({curve_, 0.0}, dt, static_cast<int>(steps), o);
    if (!r.ok) throw DomainError(r.error);
    json out_rows = json::array();
    for (std::size_t i = 1; i < r.sheet.rows.size(); ++i) {
        append(r.sheet.rows[i], "semidiscrete");
        out_rows.push_back(curve_to_json(r.sheet.rows[i]));
    }
    curve_ = r.state.curve;
    return {{"ok", true}, {"curve", curve_to_json(curve_)}, {"rows", out_rows}, {"max_drift", r.max_drift}, {"step", counter_}};
}

json Session::surface() const {
    std::shared_lock lk(mu_);
    return {{"ok", true}, {"surface", sheet_to_json(sheet_)}, {"step", counter_}};
}

json Session::reset() {
    std::unique_lock lk(mu_);
    curve_ = initial_;
    sheet_ = SurfaceSheet{};
    sheet_.push(curve_, 0.0);
    counter_ = 0;
    return {{"ok", true}, {"curve", curve_to_json(curve_)}, {"step", counter_}};
}

json Session::health() const {
    std::shared_lock lk(mu_);
    return {{"ok", true}, {"step", counter_}, {"vertices", curve_.size()}};
}

std::size_t Session::counter() const {
    std::shared_lock lk(mu_);
    return counter_;
}

struct HttpService::Impl {
    Session &session;
    httplib::Server srv;
    explicit Impl(Session &s) : session(s) {}
};

namespace {

void reply(httplib::Response &res, int status, const json &j) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
}

template <class F>
httplib::Server::Handler wrap_handler(F f, bool parse_body) {
    return [f, parse_body](const httplib::Request &req, httplib::Response &res) {
        try {
            json body = json::object();
            if (parse_body && !req.body.empty()) body = json::parse(req.body);
            if (!body.is_object()) throw FormatError("request body must be a JSON object");
            reply(res, 200, f(body));
        } catch (const json::exception &e) {
            reply(res, 400, {{"ok", false}, {"error", std::string("malformed JSON: ") + e.what()}});
        } catch (const FormatError &e) {
            reply(res, 400, {{"ok", false}, {"error", e.what()}});
        } catch (const DomainError &e) {
            reply(res, 422, {{"ok", false}, {"error", e.what()}});
        } catch (const std::exception &e) {
            reply(res, 500, {{"ok", false}, {"error", e.what()}});
        }
    };
}

}  // namespace

HttpService::HttpService(Session &s) : impl_(std::make_unique<Impl>(s)) {
    auto &srv = impl_->srv;
    Session &ss = s;
    srv.Get("/api/health", wrap_handler([&ss](const json &) { return ss.health(); }, false));
    srv.Get("/api/curve", wrap_handler([&ss](const json &) { return ss.get_curve(); }, false));
    srv.Put("/api/curve", wrap_handler([&ss](const json &b) { return ss.put_curve(b); }, true));
    srv.Post("/api/step", wrap_handler([&ss](const json &b) { return ss.step(b); }, true));
    srv.Post("/api/backlund", wrap_handler([&ss](const json &b) { return ss.backlund(b); }, true));
    srv.Post("/api/semidiscrete", wrap_handler([&ss](const json &b) { return ss.semidiscrete(b); }, true));
    srv.Get("/api/surface", wrap_handler([&ss](const json &) { return ss.surface(); }, false));
    srv.Post("/api/reset", wrap_handler([&ss](const json &) { return ss.reset(); }, false));
    srv.set_error_handler([](const httplib::Request &, httplib::Response &res) {
        if (res.body.empty()) reply(res, res.status, {{"ok", false}, {"error", "not found"}});
    });
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string &host, int port) {
    if (port == 0) return impl_->srv.bind_to_any_port(host);
    return impl_->srv.bind_to_port(host, port) ? port : -1;
}

bool HttpService::run() { return impl_->srv.listen_after_bind(); }

void HttpService::stop() {
    if (impl_) impl_->srv.stop();
}

}  // namespace hashi
