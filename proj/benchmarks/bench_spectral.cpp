#include <benchmark/benchmark.h>

#include <vector>

#include "tlsfluc/rng.hpp"
#include "tlsfluc/spectral.hpp"

using namespace tlsfluc;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  return x;
}

void BM_WelchPsd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = noise(n, 1);
  const std::size_t seg = default_segment_length(n);
  for (auto _ : state) {
    auto psd = welch_psd(x, 1.0, seg, 0.5);
    benchmark::DoNotOptimize(psd.values.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WelchPsd)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity();

void BM_Coherence(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = noise(n, 1);
  const auto b = noise(n, 2);
  const std::size_t seg = default_segment_length(n);
  for (auto _ : state) {
    auto coh = coherence(a, b, 1.0, seg, 0.5);
    benchmark::DoNotOptimize(coh.values.data());
  }
}
BENCHMARK(BM_Coherence)->Arg(1 << 12)->Arg(1 << 16);

}  // namespace

BENCHMARK_MAIN();
