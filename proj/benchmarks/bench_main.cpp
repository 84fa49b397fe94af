//! Microbenchmarks for the hot paths: exact path generation and the two
//! local-time estimators.

#include <benchmark/benchmark.h>

#include <vector>

#include "fbmlt/occupation.hpp"
#include "fbmlt/path_gen.hpp"

namespace {

void bm_cholesky_setup(benchmark::State& state) {
    const fbmlt::TimeGrid grid(1.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        fbmlt::CholeskyGenerator gen(fbmlt::HurstParam(0.7), grid);
        benchmark::DoNotOptimize(gen.draws_per_path());
    }
}
BENCHMARK(bm_cholesky_setup)->Arg(256)->Arg(1024);

void bm_cholesky_path(benchmark::State& state) {
    const fbmlt::TimeGrid grid(1.0, static_cast<std::size_t>(state.range(0)));
    const fbmlt::CholeskyGenerator gen(fbmlt::HurstParam(0.7), grid);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gen.generate(seed++).values.back());
    }
}
BENCHMARK(bm_cholesky_path)->Arg(256)->Arg(1024);

void bm_circulant_path(benchmark::State& state) {
    const fbmlt::TimeGrid grid(1.0, static_cast<std::size_t>(state.range(0)));
    const fbmlt::CirculantGenerator gen(fbmlt::HurstParam(0.7), grid);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gen.generate(seed++).values.back());
    }
}
BENCHMARK(bm_circulant_path)->Arg(256)->Arg(1024)->Arg(4096)->Arg(16384);

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

void bm_kernel_field(benchmark::State& state) {
    const fbmlt::TimeGrid grid(1.0, 2048);
    const auto path = fbmlt::generate_circulant(fbmlt::HurstParam(0.5), grid, 7);
    const auto x_grid = linspace(-2.0, 2.0, static_cast<std::size_t>(state.range(0)));
    const std::vector<double> t_grid{0.25, 0.5, 0.75, 1.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fbmlt::kernel_local_time(path, x_grid, t_grid, 0.05).values.front());
    }
}
BENCHMARK(bm_kernel_field)->Arg(41)->Arg(201);

void bm_fourier_field(benchmark::State& state) {
    const fbmlt::TimeGrid grid(1.0, 2048);
    const auto path = fbmlt::generate_circulant(fbmlt::HurstParam(0.5), grid, 7);
    const auto x_grid = linspace(-2.0, 2.0, static_cast<std::size_t>(state.range(0)));
    const std::vector<double> t_grid{0.25, 0.5, 0.75, 1.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fbmlt::fourier_local_time(path, x_grid, t_grid, 200.0, 0.05).values.front());
    }
}
BENCHMARK(bm_fourier_field)->Arg(41)->Arg(201);

} // namespace

BENCHMARK_MAIN();
