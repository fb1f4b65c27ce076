#ifndef CONICSV_TEST_HELPERS_HPP
#define CONICSV_TEST_HELPERS_HPP

#include <cmath>

#include "conicsv/cones.hpp"
#include "conicsv/rng.hpp"

namespace testing {

using namespace conicsv;

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Rejection-samples a unit vector of K = {C'x <= 0, B'x = 0}: Gaussian draws
// projected onto null(B') and kept when they satisfy the inequalities.
inline bool sample_cone_point(const ConeH& K, SplitMix64& rng, Vector& x, int tries = 10000) {
  const Index n = K.dim();
  Matrix P = Matrix::Identity(n, n);
  if (K.num_eq() > 0) {
    const Matrix Q = K.eq.householderQr().householderQ() * Matrix::Identity(n, K.num_eq());
    P -= Q * Q.transpose();
  }
  for (int t = 0; t < tries; ++t) {
    Vector y = P * gaussian_vector(n, rng);
    if (y.norm() < 1e-12) continue;
    y.normalize();
    if (K.num_ineq() == 0 || (K.ineq.transpose() * y).maxCoeff() <= 0.0) {
      x = y;
      return true;
    }
  }
  return false;
}

}  // namespace testing

#endif
