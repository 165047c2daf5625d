#pragma once

#include <cstddef>
#include <vector>

#include "hashi/quat.hpp"

namespace hashi {

struct RegularityError : DomainError {
    using DomainError::DomainError;
};
struct SeedError : DomainError {
    using DomainError::DomainError;
};

// Alternative normalization A = 1 - (Psi/2) K gives kappa = 2 tan(phi/2).
// Everything here uses factor 1.
inline constexpr double kCurvatureFactor = 1.0;
inline constexpr double kCurvatureFactorAlt = 2.0;

struct DiscreteCurve {
    std::vector<Quat> vertices;
    bool closed = false;

    std::size_t size() const { return vertices.size(); }
    std::size_t num_edges() const {
        if (vertices.empty()) return 0;
        return closed ? vertices.size() : vertices.size() - 1;
    }
    const Quat &operator[](std::size_t i) const { return vertices[i]; }
};

// Regular N-gon in the xy-plane, centred at the origin, S_0 along +x.
DiscreteCurve regular_polygon(std::size_t N, double edge = 1.0);

// Edge vectors S_n = g_{n+1} - g_n; N for closed, N-1 for open.
std::vector<Quat> tangents(const DiscreteCurve &c);
std::vector<Quat> edges_unchecked(const DiscreteCurve &c);

double total_length(const DiscreteCurve &c);
// max_n | |S_n| - len |
double edge_length_deviation(const DiscreteCurve &c, double len = 1.0);
bool is_arclength(const DiscreteCurve &c, double tol = 1e-9);

struct Binormals {
    // one entry per vertex; undefined entries carry the previous defined binormal
    std::vector<Quat> b;
    std::vector<bool> defined;
};

// (S_n x S_{n-1}) / |S_n x S_{n-1}| at vertex n.
Binormals binormals(const DiscreteCurve &c);

struct ParallelFrame {
    // F_n belongs to edge n: S_n = F_n^-1 I F_n (unit frames).
    // Closed curves carry one extra frame F_N for the holonomy.
    std::vector<Quat> F;
    std::vector<Quat> A;  // A_n = 1 - Psi_n K, F_{n+1} = A_n F_n / |A_n|
    std::vector<cplx> psi;
};

// Unit quaternion mapping I to S_0 and J to the principal normal at vertex 1.
Quat default_seed(const DiscreteCurve &c);
ParallelFrame parallel_frame(const DiscreteCurve &c, const Quat &F0);
ParallelFrame parallel_frame(const DiscreteCurve &c);

struct ComplexCurvature {
    // psi[n] sits at the vertex between S_n and S_{n+1}.
    std::vector<cplx> psi;
    bool closed = false;
    // closed curves: psi_{n+N} = twist * psi_n
    cplx twist{1.0, 0.0};

    std::size_t size() const { return psi.size(); }
    // twisted periodic access for closed curves
    cplx at(long n) const;
    std::vector<double> phi() const;  // folding angles in [0, pi)
    std::vector<double> tau() const;  // torsion increments, tau_0 = arg psi_0
};

ComplexCurvature complex_curvature(const DiscreteCurve &c);
ComplexCurvature complex_curvature(const DiscreteCurve &c, const Quat &F0);

// Open curve with psi.size() + 2 vertices: F_{n+1} = (1 - psi_n K) F_n,
// S_n = F_n^-1 I F_n, g_{n+1} = g_n + S_n.
DiscreteCurve curve_from_curvature(const std::vector<cplx> &psi, const Quat &g0 = {},
                                   const Quat &F0 = Quat::real(1.0));
// Closed curve from the first N vertices of the open reconstruction, N = psi.size().
DiscreteCurve closed_curve_from_curvature(const std::vector<cplx> &psi, const Quat &g0 = {},
                                          const Quat &F0 = Quat::real(1.0));

struct ResampleError : DomainError {
    using DomainError::DomainError;
};

// n_edges equal chords along the polyline (n_edges vertices when closed).
DiscreteCurve resample_arclength(const DiscreteCurve &c, std::size_t n_edges,
                                 double tol = 1e-12, int max_iter = 500);

struct RigidMotion {
    Quat rotation = Quat::real(1.0);
    Quat translation;

    Quat apply(const Quat &p) const;
    DiscreteCurve apply(const DiscreteCurve &c) const;
};

struct RigidFit {
    RigidMotion motion;
    double rmsd = 0.0;
    bool degenerate = false;  // fewer than three non-collinear points
};

// Least squares b ~ R a R^-1 + t via the 4x4 quaternion eigenproblem.
RigidFit fit_rigid_motion(const DiscreteCurve &a, const DiscreteCurve &b);

// Wrap index into [0, n).
inline std::size_t wrap(long i, std::size_t n) {
    const long m = static_cast<long>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

}  // namespace hashi
