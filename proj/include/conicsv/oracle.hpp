#ifndef CONICSV_ORACLE_HPP
#define CONICSV_ORACLE_HPP

#include <cstdint>
#include <string>

#include "conicsv/cones.hpp"

namespace conicsv {

// Reference solvers that share no code path with the dual method. They are
// ground truth for n <= 3 (grid) and an upper-bound envelope above that.

enum class OracleMethod { Grid, ProjectedGradient };

const char* to_string(OracleMethod m);

struct OracleResult {
  double value = 0.0;  // best 1/2 ||Ax||^2 found
  Vector x_best;
  OracleMethod method = OracleMethod::Grid;
  double resolution = 0.0;  // grid step (radians), 0 for projected gradient
  Index restarts = 0;
  Index max_iter = 0;
  std::uint64_t seed = 0;
  // Grid only: |value - true minimum| <= error_bound, with the bound
  // ||A'A||_2 * resolution.
  double error_bound = 0.0;
  Index points_feasible = 0;
};

// Exhaustive angular grid over the unit sphere of the cone's equality
// subspace (dimension 1, 2 or 3). Throws InvalidInput otherwise.
OracleResult grid_oracle(const Matrix& A, const ConeH& cone, double resolution,
                         Backend backend = Backend::OpenMP);

// Multi-start projected gradient on K ∩ sphere, step eta0 / (1 + t / tau)
// with tau = max(100, max_iter) and eta0 = 1 / ||A'A||_2. Deterministic given the seed.
OracleResult pg_oracle(const Matrix& A, const ConeH& cone, Index restarts, Index max_iter,
                       std::uint64_t seed = 1);

// min over the unit sphere of 1/2 sum lambda_i c_i^2 + sum gamma_i c_i, by
// enumeration (two points for n = 1, angular grid for n = 2, 3).
double sphere_qp_scan(const Vector& lambdas, const Vector& gammas, double resolution,
                      Backend backend = Backend::OpenMP);
// Lipschitz bound (max |lambda| + ||gamma||) * resolution for the scan; 0 at n = 1.
double sphere_qp_scan_bound(const Vector& lambdas, const Vector& gammas, double resolution);

// Nonnegative QP by enumerating every support set (k <= 16). Test oracle
// for the projected-gradient solver.
Vector exhaustive_nnqp(const Matrix& Q, const Vector& q);

}  // namespace conicsv

#endif  // CONICSV_ORACLE_HPP
