#include "cmetric/collocation.hpp"
#include "cmetric/evaluate.hpp"
#include "cmetric/kernel.hpp"
#include "cmetric/system.hpp"

#include <benchmark/benchmark.h>

namespace {

cmetric::PointList square_grid(double spacing) {
    cmetric::Vector lo(2), hi(2);
    lo << -1.0, -1.0;
    hi << 1.0, 1.0;
    return cmetric::make_grid({lo, hi, spacing, 0.0});
}

void BM_KernelHelpers(benchmark::State& state) {
    const auto kernel = cmetric::wendland_c8(0.9);
    double r = 0.0;
    for (auto _ : state) {
        r += 1e-7;
        if (r > 1.2) r = 0.0;
        benchmark::DoNotOptimize(kernel.psi(r) + kernel.psi1(r) + kernel.psi2(r));
    }
}
BENCHMARK(BM_KernelHelpers);

void BM_Assemble(benchmark::State& state) {
    const auto setup = cmetric::linear_example();
    const auto kernel = cmetric::wendland_c8(0.9);
    const auto grid = square_grid(1.0 / static_cast<double>(state.range(0)));
    for (auto _ : state) {
        auto assembly = cmetric::assemble(setup.system, kernel, grid);
        benchmark::DoNotOptimize(assembly.gram.data());
    }
    state.counters["unknowns"] = static_cast<double>(3 * grid.size());
}
BENCHMARK(BM_Assemble)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
    const auto setup = cmetric::linear_example();
    const auto kernel = cmetric::wendland_c8(0.9);
    const auto grid = square_grid(1.0 / static_cast<double>(state.range(0)));
    for (auto _ : state) {
        state.PauseTiming();
        auto assembly = cmetric::assemble(setup.system, kernel, grid);
        state.ResumeTiming();
        auto sol = cmetric::solve(std::move(assembly), kernel, setup.rhs);
        benchmark::DoNotOptimize(sol.gamma().data());
    }
}
BENCHMARK(BM_Solve)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_EvalFS(benchmark::State& state) {
    const auto setup = cmetric::linear_example();
    const auto kernel = cmetric::wendland_c8(0.9);
    const auto sol = cmetric::solve(cmetric::assemble(setup.system, kernel, square_grid(0.125)),
                                    kernel, setup.rhs);
    cmetric::Vector x(2);
    x << 0.3, -0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cmetric::eval_FS(sol, x).data());
    }
}
BENCHMARK(BM_EvalFS);

}  // namespace

BENCHMARK_MAIN();
