#include "perifide/cyclic.hpp"
#include "perifide/nystrom.hpp"

#include <benchmark/benchmark.h>
#include <cmath>

using namespace perifide;

namespace {

Model gauss_ricker(int n, int theta)
{
    ModelSpec s;
    s.rule = build_rule(RuleKind::chebyshev2, n, -1.0, 1.0);
    s.kernel = {KernelKind::gauss, 1.0};
    s.growth = {GrowthKind::ricker, 1.0};
    s.beta.assign(static_cast<std::size_t>(theta), 1.0);
    return Model(s);
}

Tuple state(const Model& m)
{
    return repeat(Vec::Constant(m.size(), 0.7), m.period());
}

const KernelFn gauss = [](double x, double y) { return std::exp(-(x - y) * (x - y)) / std::sqrt(M_PI); };

void BM_kernel_matrix(benchmark::State& st)
{
    const Vec x = Vec::LinSpaced(st.range(0), -1, 1);
    for (auto _ : st) benchmark::DoNotOptimize(kernel_matrix(gauss, x));
}

void BM_kernel_matrix_serial(benchmark::State& st)
{
    const Vec x = Vec::LinSpaced(st.range(0), -1, 1);
    for (auto _ : st) benchmark::DoNotOptimize(serial::kernel_matrix(gauss, x));
}

void BM_jacobian(benchmark::State& st)
{
    const Model m = gauss_ricker(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    const Tuple u = state(m);
    for (auto _ : st) benchmark::DoNotOptimize(assemble_jacobian(m, u, 5.0));
}

void BM_jacobian_serial(benchmark::State& st)
{
    const Model m = gauss_ricker(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    const Tuple u = state(m);
    for (auto _ : st) benchmark::DoNotOptimize(assemble_jacobian_serial(m, u, 5.0));
}

void BM_floquet(benchmark::State& st)
{
    const Model m = gauss_ricker(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    const PeriodicOrbit o{m.period(), state(m), 5.0, 0.0, 0};
    for (auto _ : st) benchmark::DoNotOptimize(floquet(m, o));
}

} // namespace

BENCHMARK(BM_kernel_matrix)->Arg(100)->Arg(400);
BENCHMARK(BM_kernel_matrix_serial)->Arg(100)->Arg(400);
BENCHMARK(BM_jacobian)->Args({50, 1})->Args({50, 4})->Args({200, 2});
BENCHMARK(BM_jacobian_serial)->Args({50, 1})->Args({50, 4})->Args({200, 2});
BENCHMARK(BM_floquet)->Args({50, 1})->Args({50, 4});

BENCHMARK_MAIN();
