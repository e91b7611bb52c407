#include <benchmark/benchmark.h>

#include "tlsfluc/io.hpp"
#include "tlsfluc/synth.hpp"

using namespace tlsfluc;

namespace {

void BM_OneOverF(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto x = gen_one_over_f_gaussian(n, 1.0, 1.0, 1.0, seed++);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OneOverF)->RangeMultiplier(4)->Range(1 << 12, 1 << 20)->Complexity();

void BM_InterleavedFast(benchmark::State& state) {
  RunConfig cfg = default_run_config();
  cfg.schedule.total_duration_s = state.range(0) * 3600.0;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.fluctuation.seed = seed++;
    auto run = simulate_interleaved_run(cfg.tls, cfg.resonator, cfg.fluctuation,
                                        cfg.schedule, cfg.measurement);
    benchmark::DoNotOptimize(run.lp.q_i.data());
  }
}
BENCHMARK(BM_InterleavedFast)->Arg(1)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
