#pragma once

#include <optional>
#include <vector>

#include "hashi/curve.hpp"
#include "hashi/exec.hpp"

namespace hashi {

struct DressingSingularity : DomainError {
    using DomainError::DomainError;
};
struct BranchError : DomainError {
    using DomainError::DomainError;
};

struct DressParamsAlgebraic {
    cplx lambda0;
    cplx s0;
};

enum class Branch { Principal, Reflected };

struct DressParamsGeometric {
    double l = 1.0;
    double delta1 = 0.0;
    Branch branch = Branch::Principal;
    Quat v0;
};

struct DressState {
    // algebraic: B_n(lambda) = 1 + lambda rho_n.
    // geometric: rho_n = Re nu + v_n, the constant part of lambda + Re nu + v_n.
    std::vector<Quat> rho;
    std::vector<Quat> v;  // Im rho_n, offsets g~_n - g_n
    cplx nu{0.0, 0.0};
};

// G_k(lambda) with G_origin = identity and G_{k+1} = U_k G_k, U_k = 1 + lambda S_k.
// Closed curves return N + 1 frames, the last one being the monodromy.
std::vector<Mat2> frame_at(const DiscreteCurve &c, cplx lambda, std::size_t origin = 0);

struct DressResult {
    DiscreteCurve curve;
    DressState state;
    // closed input: |v_N - v_0|, zero exactly when the dressed tangents are N-periodic
    double periodicity_defect = 0.0;
};

// Kernel condition (1 + lambda0 rho_k) G_k(lambda0) (1, s0)^T = 0, solved vertexwise.
DressResult dress(const DiscreteCurve &c, const DressParamsAlgebraic &p, std::size_t origin = 0,
                  Exec ex = Exec::Parallel);

// (a, b) of rho = [[a, b], [-conj b, conj a]] from rho w = -w / lambda0.
std::pair<cplx, cplx> solve_rho(cplx w1, cplx w2, cplx lambda0);

struct EdgeCoupling {
    double delta2 = 0.0;
    double k = 0.0;   // tan(delta1/2) tan(delta2/2)
    cplx nu;          // Re nu from the coupling, Im nu = l
    bool identity = false;  // delta1 = 0: no fold, the edge map is the identity
};

EdgeCoupling edge_coupling(double s, double l, double delta1, Branch branch);

struct PropagateResult {
    Quat v_plus;
    Quat S_tilde;  // S + v_plus - v
    EdgeCoupling coupling;
};

PropagateResult propagate_v(const Quat &S, const Quat &v, double delta1, Branch branch = Branch::Principal);

// nu - S acting on the gauged chart (P-chart divided by 2l).
MobiusMap mobius_of_edge(const Quat &S, double l, double delta1, Branch branch = Branch::Principal);

// max over lambda in {0, 1, -2} of |(lambda + S~)(lambda + r + v) - (lambda + r + v+)(lambda + S)|
double zero_curvature_check(const Quat &S, const Quat &v, const Quat &v_plus, const Quat &S_tilde, cplx nu);

struct BacklundResult {
    DiscreteCurve curve;
    DiscreteCurve traktrix;  // g + v/2
    DressState state;
    double closure_gap = 0.0;  // closed input: |v_N - v_0|
    double max_zero_curvature = 0.0;
};

BacklundResult backlund_geometric(const DiscreteCurve &c, const DressParamsGeometric &p);

// Algebraic parameters matching a geometric transform with ell = s:
// lambda0 = -1/nu, s0 = 1 / gauged_chart(v0).
DressParamsAlgebraic algebraic_from_geometric(const DressParamsGeometric &p, double s = 1.0);

struct BianchiResult {
    Quat hat_tilde;  // (rho^ - rho~) rho~ (rho^ - rho~)^-1
    Quat tilde_hat;  // (rho^ - rho~) rho^ (rho^ - rho~)^-1
};

BianchiResult bianchi(const Quat &rho_hat, const Quat &rho_tilde);

// Parameter for dressing the already dressed curve: projective image of (1, s0) under B_0(lambda0).
cplx transported_s0(const Quat &rho0, cplx lambda0, cplx s0);

struct PeriodicParams {
    std::vector<cplx> s0;
    bool defective = false;  // single eigenvector
};

PeriodicParams periodic_dress_params(const DiscreteCurve &c, cplx lambda0);

}  // namespace hashi
