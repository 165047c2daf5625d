#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "hashi/curve.hpp"

namespace hashi::testing {

inline Quat random_unit(std::mt19937_64 &rng) {
    std::normal_distribution<double> n;
    Quat v{0.0, n(rng), n(rng), n(rng)};
    return v / v.norm();
}

// Smooth random closed loop (a few Fourier modes), resampled to N unit edges.
// Draws again when the loop has no equilateral inscribed polygon near its arclength samples.
inline DiscreteCurve random_closed_curve(std::size_t N, std::mt19937_64 &rng, int modes = 3, double rough = 0.35) {
  for (int attempt = 0;; ++attempt) {
    std::normal_distribution<double> n;
    double a[3][8], b[3][8];
    for (int d = 0; d < 3; ++d)
        for (int k = 1; k <= modes; ++k) {
            a[d][k] = n(rng) * std::pow(rough, k - 1);
            b[d][k] = n(rng) * std::pow(rough, k - 1);
        }
    DiscreteCurve c;
    c.closed = true;
    const std::size_t M = 8 * N;
    for (std::size_t i = 0; i < M; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(M);
        double p[3] = {0, 0, 0};
        for (int d = 0; d < 3; ++d)
            for (int k = 1; k <= modes; ++k) p[d] += a[d][k] * std::cos(k * t) + b[d][k] * std::sin(k * t);
        c.vertices.push_back({0.0, p[0], p[1], p[2]});
    }
    DiscreteCurve r;
    try {
        r = resample_arclength(c, N);
    } catch (const ResampleError &) {
        if (attempt < 20) continue;
        throw;
    }
    const double s = total_length(r) / static_cast<double>(N);
    for (auto &v : r.vertices) v = (1.0 / s) * v;
    return r;
  }
}

// Open curve with unit edges and turning angles below max_turn.
inline DiscreteCurve random_open_curve(std::size_t n_vertices, std::mt19937_64 &rng, double max_turn = 1.2) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DiscreteCurve c;
    Quat g, S{0, 1, 0, 0};
    c.vertices.push_back(g);
    for (std::size_t i = 1; i < n_vertices; ++i) {
        g += S;
        c.vertices.push_back(g);
        Quat axis = cross(S, random_unit(rng));
        axis = axis / axis.norm();
        S = rotate(S, axis, max_turn * u(rng));
        S = S / S.norm();
    }
    return c;
}

}  // namespace hashi::testing
