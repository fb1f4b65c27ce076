#include "conicsv/instances.hpp"

#include "conicsv/rng.hpp"

namespace conicsv {

Instance gaussian_inequality_instance(Index d, Index n, Index m, std::uint64_t seed) {
  if (d < 1 || n < 1 || m < 0) throw InvalidInput("gaussian_inequality_instance: bad dimensions");
  SplitMix64 rng(seed);
  Instance inst;
  inst.a = gaussian_matrix(d, n, rng);
  inst.cone = ConeH(gaussian_matrix(n, m, rng), Matrix(n, 0));
  return inst;
}

std::uint64_t bench_seed(std::uint64_t base, Index n, Index trial) {
  return derive_seed(base, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial));
}

}  // namespace conicsv
