// Serial reference against OpenMP kernels, plus one full generator apply.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mixhom/coupled_solver.hpp"
#include "mixhom/kernels.hpp"

using namespace mixhom;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

template <Exec E>
void BM_matvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto w = random_vector(n * n, 1);
  const auto x = random_vector(n, 2);
  std::vector<double> y(n);
  for (auto _ : state) {
    kernels::matvec(E, w, n, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n));
}

template <Exec E>
void BM_rk4_combine(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto x = random_vector(n, 1);
  const auto k = random_vector(n, 2);
  for (auto _ : state) {
    kernels::rk4_combine(E, x, 1e-6, k, k, k, k);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <Exec E>
void BM_dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_vector(n, 1), y = random_vector(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dot(E, x, y));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <Exec E>
void BM_generator(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const Grid g = make_grid(2, m);
  const Partition p = make_chessboard(8, g);
  const DiscreteKernel k = discretize({KernelFamily::gaussian, 0.2}, g);
  const CoupledOperator op = assemble(p, k, g);
  const auto u = random_vector(g.cell_count(), 3);
  std::vector<double> out(g.cell_count());
  for (auto _ : state) {
    op.apply(u, out, E);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_matvec<Exec::serial>)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_matvec<Exec::parallel>)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_rk4_combine<Exec::serial>)->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK(BM_rk4_combine<Exec::parallel>)->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK(BM_dot<Exec::serial>)->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK(BM_dot<Exec::parallel>)->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK(BM_generator<Exec::serial>)->Arg(32)->Arg(64);
BENCHMARK(BM_generator<Exec::parallel>)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
