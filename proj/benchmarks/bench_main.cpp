#include <benchmark/benchmark.h>

#include <cmath>

#include "ramem/hankel.hpp"
#include "ramem/optimize.hpp"
#include "ramem/solver.hpp"

using namespace ramem;

namespace {

ComplexVector gaussian_input(std::size_t n) {
  ComplexVector b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = double(i) / double(n - 1);
    b[i] = std::exp(-std::pow((p - 0.5) / 0.15, 2));
  }
  return b;
}

void BM_IdealWrite(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ComplexVector b = gaussian_input(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        write_stage(DerivedCouplings::bright(2.0), b, {n, n}, Mode::ideal_bright).eta_w);
  }
}
BENCHMARK(BM_IdealWrite)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

void BM_FullMemory(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const TimeWindow window{-3.0, 3.0};
  const auto control = ControlWaveform::gaussian({0.0, 1.0, 1.0}, window);
  const auto signal = SignalPulse::gaussian(0.0, 1.0, 1.0, window);
  for (auto _ : state) {
    benchmark::DoNotOptimize(full_memory(PhysicalParams{}, control, control, signal, {n, n},
                                         Mode::full_fwm, Direction::backward)
                                 .eta_total);
  }
}
BENCHMARK(BM_FullMemory)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_AnalyticFields(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ComplexVector b = gaussian_input(n), empty(n);
  for (auto _ : state) benchmark::DoNotOptimize(analytic_fields(b, empty, 2.0, {n, n}).s.n_z());
}
BENCHMARK(BM_AnalyticFields)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_PowerIteration(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimal_mode_power_iteration(3.0, {n, n}, 400).eta_max);
  }
}
BENCHMARK(BM_PowerIteration)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_MemoryObjective(benchmark::State& state) {
  const TimeWindow window{-3.0, 3.0};
  PhysicalParams p;
  p.w_write = p.w_read = 4.0;
  const MemoryProblem problem{p,
                              SignalPulse::gaussian(0.0, 1.0, 1.0, window),
                              ControlWaveform::gaussian({0.0, 1.0, 1.0}, window),
                              window,
                              Parametrization::gaussian_ct,
                              {128, 128},
                              Mode::full_fwm,
                              Direction::backward};
  const double x[2] = {-0.2, 0.8};
  for (auto _ : state) benchmark::DoNotOptimize(memory_objective(x, problem).fitness);
}
BENCHMARK(BM_MemoryObjective)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
