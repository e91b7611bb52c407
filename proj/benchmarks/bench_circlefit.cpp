#include <benchmark/benchmark.h>

#include "tlsfluc/circlefit.hpp"
#include "tlsfluc/model.hpp"
#include "tlsfluc/synth.hpp"

using namespace tlsfluc;

namespace {

ResonatorParams bench_params() {
  ResonatorParams p;
  p.amplitude_a = {0.9, -0.15};
  p.delay_tau_s = 30e-9;
  p.f_r_hz = 6.0e9;
  p.loaded_q = 2.0e5;
  p.coupling_q_mag = 4.0e5;
  p.phi_rad = 0.15;
  return p;
}

void BM_FitResonance(benchmark::State& state) {
  const auto p = bench_params();
  const auto sweep = synth_sweep(
      p, default_sweep_grid(p, static_cast<int>(state.range(0)), 10.0), 2e-3, 7);
  for (auto _ : state) {
    auto fit = fit_resonance(sweep);
    benchmark::DoNotOptimize(fit.q_i);
  }
}
BENCHMARK(BM_FitResonance)->Arg(201)->Arg(1001);

void BM_FitCircle(benchmark::State& state) {
  const auto p = bench_params();
  const auto sweep = synth_sweep(
      p, default_sweep_grid(p, static_cast<int>(state.range(0)), 10.0), 1e-3, 8);
  for (auto _ : state) {
    auto fit = fit_circle(sweep.s21);
    benchmark::DoNotOptimize(fit.radius);
  }
}
BENCHMARK(BM_FitCircle)->Arg(201)->Arg(2001);

void BM_RemoveCableDelay(benchmark::State& state) {
  const auto p = bench_params();
  const auto sweep = synth_sweep(p, default_sweep_grid(p, 1001, 20.0), 1e-3, 9);
  for (auto _ : state) {
    auto out = remove_cable_delay(sweep);
    benchmark::DoNotOptimize(out.tau_s);
  }
}
BENCHMARK(BM_RemoveCableDelay);

}  // namespace
