#pragma once

#include <cstdint>
#include <random>

namespace tlsfluc {

// Seeded generator for all stochastic synthesis. Gaussian variates use an
// explicit Box-Muller transform so sequences do not depend on the standard
// library's normal_distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent substream derived from (seed, stream) by splitmix64 mixing.
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double normal();   // standard normal

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// splitmix64 step, also used to derive per-point seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace tlsfluc
