#include "conicsv/rng.hpp"

#include <cmath>
#include <numbers>

namespace conicsv {

std::uint64_t SplitMix64::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  SplitMix64 mix(base ^ (a * 0xD1B54A32D192ED03ULL) ^ (b * 0x8CB92BA72F3D8DD7ULL));
  return mix.next_u64();
}

Matrix gaussian_matrix(Index rows, Index cols, SplitMix64& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Vector gaussian_vector(Index n, SplitMix64& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

Vector random_unit_vector(Index n, SplitMix64& rng) {
  Vector v = gaussian_vector(n, rng);
  double norm = v.norm();
  while (norm == 0.0) {
    v = gaussian_vector(n, rng);
    norm = v.norm();
  }
  return v / norm;
}

}  // namespace conicsv
