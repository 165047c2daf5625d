#include "hashi/io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace hashi {

json curve_to_json(const DiscreteCurve &c) {
    json v = json::array();
    for (const auto &p : c.vertices) v.push_back({p.x, p.y, p.z});
    return {{"closed", c.closed}, {"vertices", v}};
}

DiscreteCurve curve_from_json(const json &j) {
    if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array())
        throw FormatError("curve JSON needs a \"vertices\" array");
    DiscreteCurve c;
    if (j.contains("closed")) {
        if (!j["closed"].is_boolean()) throw FormatError("\"closed\" must be a boolean");
        c.closed = j["closed"].get<bool>();
    }
    for (const auto &p : j["vertices"]) {
        if (!p.is_array() || p.size() != 3) throw FormatError("each vertex must be [x, y, z]");
        for (const auto &x : p)
            if (!x.is_number()) throw FormatError("vertex coordinates must be numbers");
        c.vertices.push_back({0.0, p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    return c;
}

json sheet_to_json(const SurfaceSheet &s) {
    json rows = json::array();
    for (const auto &r : s.rows) rows.push_back(curve_to_json(r));
    json params = json::object();
    for (const auto &[k, v] : s.params) params[k] = v;
    return {{"kind", s.kind}, {"params", params}, {"times", s.times}, {"rows", rows}};
}

SurfaceSheet sheet_from_json(const json &j) {
    if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array())
        throw FormatError("sheet JSON needs a \"rows\" array");
    SurfaceSheet s;
    if (j.contains("kind") && j["kind"].is_string()) s.kind = j["kind"].get<std::string>();
    if (j.contains("params") && j["params"].is_object())
        for (const auto &[k, v] : j["params"].items())
            if (v.is_number()) s.params[k] = v.get<double>();
    const bool has_times = j.contains("times") && j["times"].is_array() && j["times"].size() == j["rows"].size();
    std::size_t i = 0;
    for (const auto &r : j["rows"]) {
        const double t = has_times ? j["times"][i].get<double>() : static_cast<double>(i);
        s.push(curve_from_json(r), t);
        ++i;
    }
    if (!s.consistent()) throw FormatError("sheet rows differ in vertex count or closed flag");
    return s;
}

json dress_state_to_json(const DressState &s) {
    json rho = json::array(), v = json::array();
    for (const auto &r : s.rho) {
        const Mat2 m = to_matrix(r);
        rho.push_back({m.m11.real(), m.m11.imag(), m.m12.real(), m.m12.imag(), m.m21.real(), m.m21.imag(),
                       m.m22.real(), m.m22.imag()});
    }
    for (const auto &x : s.v) v.push_back({x.x, x.y, x.z});
    return {{"nu", {s.nu.real(), s.nu.imag()}}, {"rho", rho}, {"v", v}};
}

json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw FormatError(path + ": " + e.what());
    }
}

void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << text;
    if (!out) throw FormatError("write failed: " + path);
}

void write_json_file(const std::string &path, const json &j) { write_text_file(path, j.dump(1) + "\n"); }

DiscreteCurve read_curve(const std::string &path) { return curve_from_json(read_json_file(path)); }
SurfaceSheet read_sheet(const std::string &path) { return sheet_from_json(read_json_file(path)); }

std::string curvature_csv(const ComplexCurvature &k) {
    const auto phi = k.phi();
    const auto tau = k.tau();
    std::string out = "n,re_psi,im_psi,phi,tau\n";
    for (std::size_t n = 0; n < k.size(); ++n)
        out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", n, k.psi[n].real(), k.psi[n].imag(), phi[n], tau[n]);
    return out;
}

std::string obj_string(const SurfaceSheet &s) {
    if (s.num_rows() < 2) throw DomainError("export_obj: sheet needs at least two rows");
    if (!s.consistent()) throw DomainError("export_obj: rows differ in vertex count or closed flag");
    const std::size_t n = s.rows.front().size();
    const bool closed = s.rows.front().closed;
    std::string out = fmt::format("# {} rows x {} vertices\n", s.num_rows(), n);
    for (const auto &r : s.rows)
        for (const auto &p : r.vertices) out += fmt::format("v {:.17g} {:.17g} {:.17g}\n", p.x, p.y, p.z);
    const std::size_t cols = closed ? n : n - 1;
    for (std::size_t i = 0; i + 1 < s.num_rows(); ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const std::size_t j1 = (j + 1) % n;
            const std::size_t a = i * n + j + 1, b = i * n + j1 + 1, c = (i + 1) * n + j1 + 1, d = (i + 1) * n + j + 1;
            out += fmt::format("f {} {} {} {}\n", a, b, c, d);
        }
    return out;
}

void export_obj(const SurfaceSheet &s, const std::string &path) { write_text_file(path, obj_string(s)); }

}  // namespace hashi
