#pragma once

#include <map>
#include <string>
#include <vector>

#include "hashi/curve.hpp"

namespace hashi {

// Time-ordered curve snapshots forming a quad mesh.
struct SurfaceSheet {
    std::vector<DiscreteCurve> rows;
    std::vector<double> times;
    std::string kind;
    std::map<std::string, double> params;

    void push(const DiscreteCurve &c, double t) {
        rows.push_back(c);
        times.push_back(t);
    }
    std::size_t num_rows() const { return rows.size(); }
    // all rows share vertex count and closed flag
    bool consistent() const;
};

}  // namespace hashi
