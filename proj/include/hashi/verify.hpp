#pragma once

#include <string>
#include <vector>

#include "hashi/curve.hpp"

namespace hashi {

struct VerifyCheck {
    std::string name;
    double value = 0.0;
    double tol = 0.0;
    bool pass = false;
    bool skipped = false;
    std::string note;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_pass() const;
    std::string table() const;
};

// Invariant suite for one curve: frames, Sym formula, Lax pair, flows, Baecklund and dd steps.
VerifyReport run_verify(const DiscreteCurve &c);

}  // namespace hashi
