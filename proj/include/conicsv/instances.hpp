#ifndef CONICSV_INSTANCES_HPP
#define CONICSV_INSTANCES_HPP

#include <cstdint>

#include "conicsv/cones.hpp"

namespace conicsv {

struct Instance {
  Matrix a;
  ConeH cone;
};

// d x n standard Gaussian A and m standard Gaussian inequality normals,
// drawn in that order from SplitMix64(seed).
Instance gaussian_inequality_instance(Index d, Index n, Index m, std::uint64_t seed);

// Seed of trial `trial` at size n in the benchmark: derive_seed(base, n, trial).
std::uint64_t bench_seed(std::uint64_t base, Index n, Index trial);

}  // namespace conicsv

#endif  // CONICSV_INSTANCES_HPP
