#ifndef CONICSV_DUAL_SOLVER_HPP
#define CONICSV_DUAL_SOLVER_HPP

#include <optional>
#include <vector>

#include "conicsv/cones.hpp"
#include "conicsv/sphere_qp.hpp"

namespace conicsv {

// Smallest conic singular value
//
//   sigma_min(A; K) = min { ||Ax|| : x in K, ||x|| = 1 }
//
// through the Lagrangian dual  sup_{u in K°} theta(u),
// theta(u) = min_{||x||=1} 1/2 ||Ax||^2 + <u, x>, maximized by a projected
// quasi-Newton (BFGS) ascent. Every answer carries the duality gap between
// the recovered primal point and the final dual value.

// Iterate of the dual ascent.
struct DualState {
  Vector u;        // current point of K°
  Matrix h_inv;    // inverse quasi-Newton model of -theta
  Matrix hessian;  // its inverse, kept in sync by the direct BFGS update
  double theta = 0.0;
  Vector g;        // supergradient (a minimizer of L(., u))
  Index iter = 0;
};

enum class StepRule {
  // Projection of u + t H^{-1} g onto K° in the model metric, with
  // backtracking on t until theta does not decrease.
  CenteredAscent,
  // argmin_{u in K°} <g, u> + 1/2 <u, h_inv u>, taken without safeguards.
  Literal,
};

enum class PrimalFallback {
  None,         // report the dual representative as is
  LocalPolish,  // projected gradient on K ∩ sphere
  ExactFaces,   // face enumeration when small enough, else LocalPolish
};

enum class Recovery { DualRepresentative, ExactFaces, LocalPolish, Infeasible };

const char* to_string(Recovery r);

struct IterationRecord {
  Index iter = 0;
  double theta = 0.0;
  double step_norm = 0.0;
  double step_scale = 0.0;
  bool fallback_step = false;
  bool update_applied = false;
  double secant_residual = 0.0;  // ||h_inv' y - s|| after an applied update
  double s_norm = 0.0;
  double h_inv_min_eig = 0.0;    // only when SolveOptions::trace_eigs
};

struct SolveOptions {
  double eps = 1e-4;
  Index max_iter = 5000;
  double curvature_tol = 1e-10;
  int max_halvings = 30;
  double ascent_slack = 1e-12;
  double gap_tol = 1e-6;              // relative to 1 + primal value
  double complementarity_tol = 1e-6;  // relative to 1 + ||u*||
  double feasibility_tol = 1e-6;
  StepRule step_rule = StepRule::CenteredAscent;
  PrimalFallback primal_fallback = PrimalFallback::ExactFaces;
  Index max_faces = 4096;
  // Warm start; projected onto K° before use. Default is u = 0.
  std::optional<Vector> initial_u;
  bool record_trace = false;
  bool trace_eigs = false;
};

struct ConicSvResult {
  double sigma_min = 0.0;
  Vector x_star;
  Vector u_star;
  double gap = 0.0;  // 1/2 ||A x*||^2 - theta(u*)
  Index iters = 0;
  // Certified: the ascent stopped on its step rule and the primal point
  // closes the duality gap with complementarity.
  bool converged = false;
  double wall_time = 0.0;

  double primal_value = 0.0;  // 1/2 ||A x*||^2
  double dual_value = 0.0;    // theta(u*)
  double complementarity = 0.0;
  bool loop_converged = false;
  bool feasible = false;
  Recovery recovery = Recovery::Infeasible;
  std::vector<IterationRecord> trace;
};

// A minimizer of L(., u), in original coordinates. `hint` (original
// coordinates) steers the choice inside a degenerate minimizer sphere.
Vector supergradient(const SpectralDecomposition& spec, const Vector& u, const Vector& hint);

struct StepResult {
  Vector u;
  bool converged = true;  // false when the inner QP hit its iteration cap
  double kkt_residual = 0.0;
};

// Centered quasi-Newton ascent step onto the polar cone.
StepResult qn_step(const DualState& state, const ConeG& polar, double step_scale);
// Algorithm-literal subproblem (uncentered).
StepResult literal_step(const DualState& state, const ConeG& polar);

// BFGS inverse update; returns false (h_inv untouched) when
// y's <= curvature_tol ||y|| ||s||.
bool bfgs_update_inverse(Matrix& h_inv, const Vector& s, const Vector& y, double curvature_tol);
// Direct BFGS update of the model Hessian under the same safeguard.
bool bfgs_update_direct(Matrix& hessian, const Vector& s, const Vector& y, double curvature_tol);

struct PrimalRecoveryResult {
  Vector x;
  bool feasible = false;
  Recovery method = Recovery::Infeasible;
};

// Picks a point of the minimizer set of L(., u_star) that lies in K, or falls
// back to a primal search when none does.
PrimalRecoveryResult recover_primal(const SpectralDecomposition& spec, const Vector& u_star,
                                    const ConeH& cone, const Vector& hint,
                                    const SolveOptions& opts = {},
                                    const ConeProjector* polar = nullptr,
                                    const Matrix* gram = nullptr);

// 1/2 ||A x||^2 - theta(u).
double duality_gap(const SpectralDecomposition& spec, const Vector& x_star, const Vector& u_star);

ConicSvResult solve(const Matrix& A, const ConeH& cone, const SolveOptions& opts = {});

}  // namespace conicsv

#endif  // CONICSV_DUAL_SOLVER_HPP
