#include <pit/parareal.hpp>
#include <pit/problems.hpp>
#include <pit/propagators.hpp>

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace pit;

Vector colpitts_u0() {
  Vector u(4);
  u << 9.75, 1.0, 1.0, 1.0;
  return u;
}

void BM_FineWindow(benchmark::State& state) {
  const OdeSystem sys = colpitts_system();
  PropagatorConfig cfg;
  cfg.fine_steps_per_window = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fine_propagate(sys, 1.125e-4, 0.0, 0.1, colpitts_u0(), cfg));
  }
}
BENCHMARK(BM_FineWindow)->Arg(100)->Arg(1000);

void BM_BlockSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const OdeSystem sys = colpitts_system();
  const LinearSurrogate s = colpitts_surrogate();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Vector> g(n);
  std::vector<Vector> h(n);
  for (std::size_t w = 0; w < n; ++w) {
    g[w] = Vector::NullaryExpr(4, [&] { return 1e-3 * dist(rng); });
    h[w] = Vector::NullaryExpr(4, [&] { return dist(rng); });
  }
  const BlockSystem bs =
      assemble_block_system(sys.mass(), s, 1.0 / static_cast<double>(n), 1.125e-4, g, h);
  const ShootingState ref{std::vector<Vector>(n, colpitts_u0()), 1.125e-4};
  for (auto _ : state) benchmark::DoNotOptimize(solve_block_system(bs, ref));
}
BENCHMARK(BM_BlockSolve)->Arg(10)->Arg(40);

void BM_MinNorm(benchmark::State& state) {
  const auto m = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> dist;
  const Matrix a = Matrix::NullaryExpr(m, m + 1, [&] { return dist(rng); });
  const Vector b = Vector::NullaryExpr(m, [&] { return dist(rng); });
  for (auto _ : state) benchmark::DoNotOptimize(solve_min_norm(a, b));
}
BENCHMARK(BM_MinNorm)->Arg(20)->Arg(40)->Arg(160);

}  // namespace

BENCHMARK_MAIN();
