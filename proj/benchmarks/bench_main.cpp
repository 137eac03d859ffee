#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "roughflow/brownian.hpp"
#include "roughflow/drift.hpp"
#include "roughflow/flow.hpp"
#include "roughflow/heat_kernel.hpp"
#include "roughflow/holder.hpp"
#include "roughflow/interpolant.hpp"
#include "roughflow/parabolic.hpp"

using namespace roughflow;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TimeIndexedField weierstrass(int n, int m) {
  DriftSpec spec;
  spec.alpha = 0.5;
  spec.q = 2.0;
  spec.theta = 0.45;
  spec.J = 4;
  spec.amplitude = 0.5;
  return generate_drift(spec, Torus(1, kTwoPi, n), TimeGrid(1.0, m));
}

GridField sine_field(int n) {
  const Torus t(1, kTwoPi, n);
  GridField f(t, 1);
  for (std::size_t i = 0; i < t.size(); ++i) f.at(i) = std::sin(t.coordinate(i)[0]) + 0.3 * std::cos(5 * t.coordinate(i)[0]);
  return f;
}

}  // namespace

static void BM_HeatConvolve(benchmark::State& state) {
  const auto f = sine_field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(heat_convolve(f, 1e-3));
}
BENCHMARK(BM_HeatConvolve)->Arg(256)->Arg(4096);

static void BM_SolveMild(benchmark::State& state) {
  const auto b = weierstrass(static_cast<int>(state.range(0)), 64);
  const PdeProblem p{b, b, 4.0, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(solve_mild(p));
}
BENCHMARK(BM_SolveMild)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_InterpolantEvaluate(benchmark::State& state) {
  const FourierInterpolant in(sine_field(static_cast<int>(state.range(0))));
  double v = 0.0, g = 0.0, h = 0.0;
  double x = 0.1;
  for (auto _ : state) {
    in.evaluate(Point{x, 0.0}, &v, &g, &h);
    x += 1e-3;
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_InterpolantEvaluate)->Arg(64)->Arg(512);

static void BM_HolderSeminorm(benchmark::State& state) {
  const auto f = sine_field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_holder_seminorm(f, 0.5));
}
BENCHMARK(BM_HolderSeminorm)->Arg(256)->Arg(1024);

static void BM_FlowEuler(benchmark::State& state) {
  const auto b = weierstrass(64, 64);
  const SdeSystem sys(b);
  const BrownianDriver drv(1, TimeGrid(1.0, 256), 1, static_cast<int>(state.range(0)));
  const std::vector<Point> pts{{0.5, 0.0}, {2.0, 0.0}, {4.0, 0.0}, {5.5, 0.0}};
  for (auto _ : state) benchmark::DoNotOptimize(integrate_forward(sys, drv, 0, 256, pts));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 4 * 256);
}
BENCHMARK(BM_FlowEuler)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_BrownianDriver(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(BrownianDriver(7, TimeGrid(1.0, 1024), 1, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BrownianDriver)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
