#include <benchmark/benchmark.h>

#include "lipcausal/lipcausal.hpp"

namespace {

using namespace lipcausal;

Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

void BM_IntegrateRosen(benchmark::State& state) {
  const auto g = make_metric({"rosen_wave", 4, {}, {}});
  IntegrationOptions opt;
  opt.hull_checks = 0;
  const double step = 1.0 / static_cast<double>(state.range(0));
  const FilippovState init{make_vec({-0.2, 0, -0.05, 0.05}), make_vec({0.4, 0.05, 0.1, -0.08}), 0};
  for (auto _ : state) benchmark::DoNotOptimize(integrate_geodesic(g, init, 1.0, step, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IntegrateRosen)->Arg(100)->Arg(1000)->Arg(10000);

void BM_IntegrateConformal(benchmark::State& state) {
  const auto g = make_metric({"conformal", 3, {{"epsilon", 0.3}}, {}});
  IntegrationOptions opt;
  opt.hull_checks = 0;
  const FilippovState init{make_vec({-0.5, 0.2, 0.1}), make_vec({1.0, 0.3, -0.2}), 0};
  for (auto _ : state) benchmark::DoNotOptimize(integrate_geodesic(g, init, 1.0, 1e-3, opt));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_IntegrateConformal);

void BM_TriangleSweep(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(triangle_sweep(n, 100000, 7, 1));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_TriangleSweep)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_HullDistance(benchmark::State& state) {
  Rng rng(3);
  const auto m = static_cast<int>(state.range(0));
  std::vector<Vec> pts;
  for (int i = 0; i < m; ++i) pts.push_back(uniform_in_ball(rng, 4, 1.0));
  const Vec target = make_vec({0.3, -0.2, 0.5, 0.9});
  for (auto _ : state) benchmark::DoNotOptimize(convex_hull_distance(pts, target));
}
BENCHMARK(BM_HullDistance)->Arg(8)->Arg(64)->Arg(512);

void BM_MaximizeConformal(benchmark::State& state) {
  const auto g = make_metric({"conformal", 3, {{"epsilon", 0.3}}, {}});
  const Vec x = make_vec({-0.6, 0.2, 0.1});
  const Vec y = make_vec({0.6, -0.1, 0.3});
  const auto m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(maximize_causal_curve(g, x, y, m));
}
BENCHMARK(BM_MaximizeConformal)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_HolderEstimate(benchmark::State& state) {
  const auto curve = holder_angle_curve(0.5, 10000);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_holder_exponent(curve));
}
BENCHMARK(BM_HolderEstimate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
