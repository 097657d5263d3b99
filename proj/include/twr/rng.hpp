#pragma once

#include <cstdint>

#include "twr/types.hpp"

namespace twr {

// Counter-based generator: output i is a splitmix64-style hash of
// (key, i), so any (seed, stream) pair yields a reproducible sequence on
// every platform and streams can be consumed in parallel. Gaussians come
// from Box-Muller in polar form.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  double next_unit();   // uniform in [0, 1)
  double next_gauss();  // N(0, 1), real
  cxd next_cgauss();    // circular complex normal, unit variance

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace twr
