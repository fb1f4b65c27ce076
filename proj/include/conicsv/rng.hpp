#ifndef CONICSV_RNG_HPP
#define CONICSV_RNG_HPP

#include <cstdint>

#include "conicsv/common.hpp"

namespace conicsv {

// SplitMix64 generator. The output sequence is fixed by three constants:
//   state += 0x9E3779B97F4A7C15
//   z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
// Uniforms take the top 53 bits; normals use one Box-Muller draw per value
// (no caching of the sine branch), so a stream is reproducible anywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double uniform();
  // Standard normal: sqrt(-2 ln(1 - u1)) * cos(2 pi u2).
  double normal();

 private:
  std::uint64_t state_;
};

// Mixes a base seed with stream coordinates, e.g. (n, trial).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

// rows x cols i.i.d. standard normal matrix, filled row by row.
Matrix gaussian_matrix(Index rows, Index cols, SplitMix64& rng);
Vector gaussian_vector(Index n, SplitMix64& rng);
// Uniform on the unit sphere of R^n.
Vector random_unit_vector(Index n, SplitMix64& rng);

}  // namespace conicsv

#endif  // CONICSV_RNG_HPP
