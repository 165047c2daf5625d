#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hashi/curve.hpp"
#include "hashi/ddflow.hpp"

namespace hashi {

struct ElasticParams {
    double C = 0.0;
    double mu = 0.0;  // rod torsion, 0 for the elastica
    cplx psi0, psi1;
};

// C psi_n / (1 + |psi_n|^2) = e^{i mu} psi_{n+1} + e^{-i mu} psi_{n-1}, n >= 1.
// Returns psi_0 .. psi_{N-1} as open curvature.
ComplexCurvature elastic_curvature_sequence(const ElasticParams &p, std::size_t N);

// Max recurrence defect; closed curvature is checked cyclically, open curvature on 1..N-2.
double recurrence_residual(const ComplexCurvature &psi, double C, double mu);

struct ElasticFit {
    double C = 0.0;
    double mu = 0.0;
    double residual = 0.0;  // sigma_min / sigma_max of the 3-column fit
};

// Best real (C, mu) for a given curvature sequence.
ElasticFit elastic_fit(const ComplexCurvature &psi);

enum class ElasticClass { Any, Convex, FigureEight };

struct ClosureOptions {
    ElasticClass cls = ElasticClass::Any;
    double tol = 1e-8;        // on the closure gap (not squared)
    int random_starts = 0;    // appended after the deterministic grid
    std::uint64_t seed = 0;
    std::vector<ElasticParams> starts;  // tried before everything else
};

struct ClosureResult {
    ElasticParams params;
    double gap = 0.0;  // sqrt(|g_N - g_0|^2 + |S_N - S_0|^2 + |S_{N+1} - S_1|^2)
    bool closed = false;
    int turning = 0;   // planar curves only
    int sign_changes = 0;
    DiscreteCurve curve;  // N vertices, closed flag set when closed
};

double closure_gap(const ElasticParams &p, std::size_t N);

ClosureResult closure_search(std::size_t N, double mu, const ClosureOptions &opt = {});

enum class FlowMode { Semidiscrete, DoublyDiscrete };

struct CertifyParams {
    double tau = 0.1;  // semidiscrete integration time
    double dt = 1e-3;
    DDParams dd;
};

struct RigidCertificate {
    double rmsd = 0.0;
    double theta = 0.0;  // psi~ ~ e^{2 i theta} psi
    RigidMotion motion;
    DiscreteCurve evolved;
    // semidiscrete: max |dnlse_rhs - i omega psi| / max |psi|, omega = 2 theta / tau
    double stationarity = 0.0;
};

RigidCertificate certify_rigid(const DiscreteCurve &c, FlowMode mode, const CertifyParams &p = {});

}  // namespace hashi
