#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "qmlab/analysis.hpp"
#include "qmlab/quantization.hpp"
#include "qmlab/quasimodes.hpp"
#include "qmlab/reduction.hpp"
#include "qmlab/symbol_text.hpp"

using namespace qmlab;

namespace {

GridFunction noise(const TorusGrid& g) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  GridFunction u(g);
  for (auto& z : u.values()) z = Complex(d(rng), d(rng));
  return u;
}

void BM_Fourier(benchmark::State& state) {
  const TorusGrid g(2, static_cast<int>(state.range(0)));
  const GridFunction u = noise(g);
  for (auto _ : state) benchmark::DoNotOptimize(semiclassical_fourier(u, 0.01));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(u.size()));
}
BENCHMARK(BM_Fourier)->RangeMultiplier(4)->Range(64, 1024);

void BM_ApplyHelmholtz(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const TorusGrid g(2, N);
  const double lambda = N / 8.0;
  const Quasimode q = make_cluster(g, lambda, 1.0);
  const Symbol p = Symbol::helmholtz(2);
  for (auto _ : state) benchmark::DoNotOptimize(apply_operator(p, q.u, q.h));
}
BENCHMARK(BM_ApplyHelmholtz)->RangeMultiplier(4)->Range(64, 1024);

void BM_ApplyXDependent(benchmark::State& state) {
  const std::vector<double> xi0{0.25, 0.0};
  const double h = std::ldexp(1.0, -static_cast<int>(state.range(0)));
  const TorusGrid g = wave_packet_grid(2, xi0, h);
  const GridFunction u = make_wave_packet(g, xi0, h);
  const Symbol p = parse_symbol("xi1^2 + x1*xi2 + x2^2*xi1 - 1", 2);
  for (auto _ : state) benchmark::DoNotOptimize(apply_operator(p, u, h));
  state.counters["N"] = g.points_per_axis();
}
BENCHMARK(BM_ApplyXDependent)->DenseRange(4, 9, 1);

void BM_MakeCluster(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  const TorusGrid g(2, grid_points_for(lambda, 8.0));
  for (auto _ : state) benchmark::DoNotOptimize(make_cluster(g, lambda, 1.0));
}
BENCHMARK(BM_MakeCluster)->RangeMultiplier(2)->Range(32, 512);

void BM_LpNorm(benchmark::State& state) {
  const TorusGrid g(2, 1024);
  const GridFunction u = noise(g);
  const double p = state.range(0) == 0 ? kInfinity : static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lp_norm(u, p));
}
BENCHMARK(BM_LpNorm)->Arg(2)->Arg(6)->Arg(0);

void BM_ReduceAll(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<Symbol> fam{Symbol::helmholtz(n)};
  for (int i = 1; i < n - 1; ++i) fam.push_back(Symbol::xi(n, i));
  PhasePoint pt{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  pt.xi(0) = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(reduce_all(fam, pt));
}
BENCHMARK(BM_ReduceAll)->DenseRange(3, 6, 1);

}  // namespace

BENCHMARK_MAIN();
