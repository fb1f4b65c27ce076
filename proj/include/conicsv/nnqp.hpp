#ifndef CONICSV_NNQP_HPP
#define CONICSV_NNQP_HPP

#include "conicsv/common.hpp"

namespace conicsv {

// Nonnegative quadratic programs
//
//   minimize  1/2 x'Qx + q'x   subject to  x >= 0,
//
// with Q symmetric positive semidefinite. Cone projections (NNLS with
// Q = V'V) and the dual quasi-Newton step both reduce to this form.

enum class NnqpMethod {
  Auto,               // active set up to kActiveSetLimit variables, else SPG
  ActiveSet,          // Lawson-Hanson on the Gram form; exact up to roundoff
  ProjectedGradient,  // spectral projected gradient
};

constexpr Index kActiveSetLimit = 400;

struct NnqpOptions {
  NnqpMethod method = NnqpMethod::Auto;
  // Stop when the projected-gradient residual ||x - max(0, x - grad)||_inf
  // drops below kkt_tol * (1 + ||q||_inf).
  double kkt_tol = 1e-8;
  // 0 selects 10 * k * max(k, 10) for SPG, 3k + 10 outer steps for the active set.
  Index max_iter = 0;
  // Window of the nonmonotone (GLL) line search.
  int memory = 10;
};

struct NnqpResult {
  Vector x;
  double objective = 0.0;
  double kkt_residual = 0.0;
  Index iterations = 0;
  bool converged = false;
};

double nnqp_objective(const Matrix& Q, const Vector& q, const Vector& x);

// Unscaled projected-gradient residual.
double nnqp_kkt_residual(const Matrix& Q, const Vector& q, const Vector& x);

// Dispatches on opts.method. `warm` may be empty.
NnqpResult solve_nnqp(const Matrix& Q, const Vector& q, const NnqpOptions& opts = {},
                      const Vector& warm = Vector());

// Spectral projected gradient (Barzilai-Borwein steps with a nonmonotone
// safeguard).
NnqpResult solve_nnqp_spg(const Matrix& Q, const Vector& q, const NnqpOptions& opts = {},
                          const Vector& warm = Vector());

// Lawson-Hanson active set. The support of `warm` seeds the passive set.
// Falls back to SPG (warm-started) if a passive subsystem turns singular
// or the step budget runs out.
NnqpResult solve_nnqp_active_set(const Matrix& Q, const Vector& q, const NnqpOptions& opts = {},
                                 const Vector& warm = Vector());

}  // namespace conicsv

#endif  // CONICSV_NNQP_HPP
