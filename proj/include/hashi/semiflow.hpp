#pragma once

#include <string>
#include <vector>

#include "hashi/curve.hpp"
#include "hashi/exec.hpp"
#include "hashi/sheet.hpp"

namespace hashi {

struct SingularityError : DomainError {
    using DomainError::DomainError;
};

struct FlowState {
    DiscreteCurve curve;
    double time = 0.0;
};

// gamma_dot_k = 2 (S_{k-1} x S_k) / (1 + <S_k, S_{k-1}>) at vertex k.
// Open curves keep their end vertices fixed.
std::vector<Quat> hashimoto_velocity(const DiscreteCurve &c, Exec ex = Exec::Parallel);

// S_dot_k = gamma_dot_{k+1} - gamma_dot_k, one entry per edge.
std::vector<Quat> heisenberg_rhs(const DiscreteCurve &c, Exec ex = Exec::Parallel);

enum class Scheme { RK4, Midpoint };

struct IntegrateResult {
    FlowState state;
    SurfaceSheet sheet;
    double max_drift = 0.0;  // max over snapshots of max_n ||S_n| - |S_n(0)||
    bool ok = true;
    std::string error;
};

struct IntegrateOptions {
    Scheme scheme = Scheme::RK4;
    bool renormalize = false;  // rescale edges to their initial lengths after each step
    int record_every = 1;
    Exec exec = Exec::Parallel;
};

IntegrateResult integrate(const FlowState &s, double dt, int steps, const IntegrateOptions &opt = {});

// Psi_dot_k = i (Psi_{k+1} - 2 Psi_k + Psi_{k-1} + |Psi_k|^2 (Psi_{k+1} + Psi_{k-1})).
// Closed curvature uses twisted periodic neighbours, open curvature zero padding.
std::vector<cplx> dnlse_rhs(const ComplexCurvature &psi, Exec ex = Exec::Parallel);

struct EquivalenceReport {
    double residual = 0.0;  // max_k |D_k - R_k - i beta Psi_k| / max_k |R_k|
    double beta = 0.0;      // fitted gauge rotation rate
};

// Central difference of complex_curvature along the flow against dnlse_rhs.
EquivalenceReport verify_equivalence(const DiscreteCurve &c, double dt);

// (G_k^-1 dG_k/dlambda) at lambda with G_k = U_{k-1} ... U_0, U_j = 1 + lambda S_j,
// by forward accumulation of the derivative. At lambda = 0 this is g_k - g_0.
Quat sym_point(const std::vector<Quat> &S, std::size_t k, double lambda = 0.0);

// max_k |U_dot_k - (V_{k+1} U_k - U_k V_k)| with U_dot_k = lambda S_dot_k.
double lax_residual(const DiscreteCurve &c, double lambda);
Quat lax_V(const Quat &Sk, const Quat &Skm1, double lambda);

}  // namespace hashi
