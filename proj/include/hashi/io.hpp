#pragma once

#include <string>

#include "hashi/backlund.hpp"
#include "hashi/curve.hpp"
#include "hashi/sheet.hpp"
#include "json.hpp"

namespace hashi {

struct FormatError : DomainError {
    using DomainError::DomainError;
};

using json = nlohmann::json;

// {"closed": bool, "vertices": [[x, y, z], ...]}
json curve_to_json(const DiscreteCurve &c);
DiscreteCurve curve_from_json(const json &j);

// {"kind": s, "params": {...}, "times": [...], "rows": [curve, ...]}
json sheet_to_json(const SurfaceSheet &s);
SurfaceSheet sheet_from_json(const json &j);

// {"nu": [re, im], "rho": [[re m11, im m11, re m12, im m12, re m21, im m21, re m22, im m22], ...],
//  "v": [[x, y, z], ...]}, rho in its 2x2 complex form
json dress_state_to_json(const DressState &s);

json read_json_file(const std::string &path);
void write_text_file(const std::string &path, const std::string &text);
void write_json_file(const std::string &path, const json &j);

DiscreteCurve read_curve(const std::string &path);
SurfaceSheet read_sheet(const std::string &path);

// n,re_psi,im_psi,phi,tau
std::string curvature_csv(const ComplexCurvature &k);

// Vertices row-major, quads (i,j)-(i,j+1)-(i+1,j+1)-(i+1,j); closed rows wrap in j.
std::string obj_string(const SurfaceSheet &s);
void export_obj(const SurfaceSheet &s, const std::string &path);

}  // namespace hashi
