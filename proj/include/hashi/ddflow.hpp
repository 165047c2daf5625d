#pragma once

#include <optional>
#include <vector>

#include "hashi/backlund.hpp"
#include "hashi/sheet.hpp"

namespace hashi {

struct DDParams {
    // delta1 = pi/2 exactly with l = s is the degenerate identity step
    double delta1 = 1.4707963267948966;  // pi/2 - 0.1
    double l = 1.0;
    Branch branch = Branch::Principal;
};

struct SweepMonodromy {
    MobiusMap M;
    FixedPoints fp;
    std::vector<Quat> vectors;  // fixed points as offset vectors of length l
};

SweepMonodromy sweep_monodromy(const DiscreteCurve &c, const DDParams &p);

struct FixedPointChoice {
    Quat v0;
    double angle = 0.0;  // angle between v0 and -S_{N-1}
    bool all_fixed = false;
    bool singular = false;   // rank-one monodromy
    bool warning = false;    // angle > pi/2
    bool collision = false;  // the two fixed points nearly coincide
    std::optional<Quat> rejected;
};

// Fixed point best aligned with -S_{N-1}; ties go to the smaller chart coordinate.
FixedPointChoice select_fixed_point(const SweepMonodromy &m, const DiscreteCurve &c, const DDParams &p);

struct DDStepResult {
    DiscreteCurve curve;
    FixedPointChoice first, second;
    double closure_gap = 0.0;  // worst |v_N - v_0| of the two transforms
};

// Transform with +delta1, then with -delta1 applied to the reversed curve
// (selection near its own -S_{N-1}), and reverse back.
DDStepResult dd_step_detail(const DiscreteCurve &c, const DDParams &p);
DiscreteCurve dd_step(const DiscreteCurve &c, const DDParams &p);

SurfaceSheet dd_sweep_surface(const DiscreteCurve &c, const DDParams &p, int steps);

DiscreteCurve reversed(const DiscreteCurve &c);

struct ALReport {
    cplx alpha_plus, alpha_0, alpha_minus;
    double residual = 0.0;          // sigma_min / sigma_max of the homogeneous fit
    double printed_residual = 0.0;  // relative residual of the relation with left side (q~ - q)/i
    double lambda_N = 1.0;          // Lambda_N, equal to 1 when the Lambda telescope closes
    int nullity = 0;                // singular values below 1e-10 sigma_max
    bool identity = false;
    std::vector<cplx> A;            // A_n, n = 0..N
    std::vector<double> Lambda;     // Lambda_n, n = 0..N
};

// Fits alpha_+, alpha_0, alpha_- in
//   0 = a+ q_{n+1} - a0 q_n + conj(a0) q~_n - conj(a+) q~_{n-1}
//       + a+ q_n A_{n+1} - conj(a+) q~_n conj(A_n)
//       + (-conj(a-) q~_{n+1} + a- q_{n-1}) (1 + |q~_n|^2) Lambda_n
// with A_n = q_n conj(q_{n-1}) + sum_{j<n} (q_j conj(q_{j-1}) - q~_j conj(q~_{j-1})),
// Lambda_n = prod_{j<n} (1 + |q~_j|^2) / (1 + |q_j|^2).
ALReport al_consistency(const ComplexCurvature &psi, const ComplexCurvature &psi_t);

struct ALElastic {
    ALReport al;
    double C = 0.0;
    double mu = 0.0;
    double residual = 0.0;
};

// Rigid pair psi~ = e^{2 i theta} psi. The trivial null direction (a0 ~ e^{i theta})
// is factored out; the remaining constants reduce to
//   C psi_n / (1 + |psi_n|^2) = e^{i mu} psi_{n+1} + e^{-i mu} psi_{n-1}.
ALElastic al_elastic_reduction(const ComplexCurvature &psi, double theta);

}  // namespace hashi
