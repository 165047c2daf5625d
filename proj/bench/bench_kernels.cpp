// Serial vs OpenMP variants of the per-vertex kernels.
#include <benchmark/benchmark.h>

#include "hashi/backlund.hpp"
#include "hashi/semiflow.hpp"

using namespace hashi;

namespace {

// smooth closed test loop, a (2,3) torus knot sampled at N vertices
DiscreteCurve knot(std::size_t N) {
    DiscreteCurve c;
    c.closed = true;
    for (std::size_t i = 0; i < N; ++i) {
        const double t = 2 * 3.141592653589793 * static_cast<double>(i) / static_cast<double>(N);
        const double r = 2 + std::cos(3 * t);
        c.vertices.push_back(Quat::vec(r * std::cos(2 * t), r * std::sin(2 * t), std::sin(3 * t)));
    }
    return c;
}

Exec exec_of(const benchmark::State &s) { return s.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_velocity(benchmark::State &s) {
    const auto c = knot(static_cast<std::size_t>(s.range(0)));
    const Exec ex = exec_of(s);
    for (auto _ : s) benchmark::DoNotOptimize(hashimoto_velocity(c, ex));
    s.SetItemsProcessed(s.iterations() * s.range(0));
}

void BM_dnlse_rhs(benchmark::State &s) {
    const auto k = complex_curvature(knot(static_cast<std::size_t>(s.range(0))));
    const Exec ex = exec_of(s);
    for (auto _ : s) benchmark::DoNotOptimize(dnlse_rhs(k, ex));
    s.SetItemsProcessed(s.iterations() * s.range(0));
}

void BM_dress(benchmark::State &s) {
    const auto c = knot(static_cast<std::size_t>(s.range(0)));
    const DressParamsAlgebraic p{cplx(0.3, 0.45), cplx(0.5, 1.0)};
    const Exec ex = exec_of(s);
    for (auto _ : s) benchmark::DoNotOptimize(dress(c, p, 0, ex));
    s.SetItemsProcessed(s.iterations() * s.range(0));
}

void args(benchmark::internal::Benchmark *b) {
    b->ArgNames({"N", "parallel"});
    for (long n : {256L, 4096L, 65536L})
        for (long par : {0L, 1L}) b->Args({n, par});
}

}  // namespace

BENCHMARK(BM_velocity)->Apply(args);
BENCHMARK(BM_dnlse_rhs)->Apply(args);
BENCHMARK(BM_dress)->Apply(args);

BENCHMARK_MAIN();
