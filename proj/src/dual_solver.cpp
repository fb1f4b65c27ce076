#include "conicsv/dual_solver.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>

#include "conicsv/primal.hpp"

namespace conicsv {

const char* to_string(Recovery r) {
  switch (r) {
    case Recovery::DualRepresentative: return "dual_representative";
    case Recovery::ExactFaces: return "exact_faces";
    case Recovery::LocalPolish: return "local_polish";
    case Recovery::Infeasible: return "infeasible";
  }
  return "unknown";
}

Vector supergradient(const SpectralDecomposition& spec, const Vector& u, const Vector& hint) {
  const SphereQpSolution sol = solve_sphere_qp(spec, u);
  const Vector hint_phi = hint.size() == spec.size() ? Vector(spec.phi.transpose() * hint)
                                                     : Vector(Vector::Ones(spec.size()));
  return spec.phi * solution_representative(sol, hint_phi);
}

namespace {

StepResult solve_step_qp(const ConeG& polar, const Matrix& Q, const Vector& q) {
  NnqpOptions opts;
  opts.kkt_tol = 1e-8;
  opts.max_iter = std::max<Index>(50 * polar.size(), 200);
  const NnqpResult r = solve_nnqp(Q, q, opts);
  StepResult out;
  out.u = polar.gens * r.x;
  out.converged = r.converged;
  out.kkt_residual = r.kkt_residual;
  return out;
}

// Centered model in the weights: Q = V'HV / t, q = -(V'H u)/t - V'g. The
// t-independent pieces are formed once per iteration.
struct CenteredModel {
  Matrix vhv;
  Vector vhu;
  Vector vg;

  CenteredModel(const DualState& state, const ConeG& polar) {
    const Matrix HV = state.hessian * polar.gens;
    vhv = polar.gens.transpose() * HV;
    vhu = HV.transpose() * state.u;
    vg = polar.gens.transpose() * state.g;
  }

  StepResult step(const ConeG& polar, double t) const {
    return solve_step_qp(polar, vhv / t, -vhu / t - vg);
  }
};

}  // namespace

StepResult qn_step(const DualState& state, const ConeG& polar, double step_scale) {
  if (!(step_scale > 0.0)) throw InvalidInput("qn_step: step_scale must be positive");
  if (polar.size() == 0) return StepResult{Vector::Zero(state.u.size()), true, 0.0};
  // max <g, u - u_l> - 1/(2t) (u - u_l)' H (u - u_l) over u = V lambda, lambda >= 0.
  return CenteredModel(state, polar).step(polar, step_scale);
}

StepResult literal_step(const DualState& state, const ConeG& polar) {
  if (polar.size() == 0) return StepResult{Vector::Zero(state.u.size()), true, 0.0};
  const Matrix Q = polar.gens.transpose() * state.h_inv * polar.gens;
  const Vector q = polar.gens.transpose() * state.g;
  return solve_step_qp(polar, Q, q);
}

bool bfgs_update_inverse(Matrix& h_inv, const Vector& s, const Vector& y, double curvature_tol) {
  const double ys = y.dot(s);
  if (!(ys > curvature_tol * y.norm() * s.norm())) return false;
  // (I - s y'/ys) H (I - y s'/ys) + s s'/ys, expanded.
  const Vector Hy = h_inv * y;
  const double yHy = y.dot(Hy);
  h_inv.noalias() -= (s * Hy.transpose() + Hy * s.transpose()) / ys;
  h_inv.noalias() += ((1.0 + yHy / ys) / ys) * (s * s.transpose());
  h_inv = 0.5 * (h_inv + h_inv.transpose()).eval();
  return true;
}

bool bfgs_update_direct(Matrix& hessian, const Vector& s, const Vector& y, double curvature_tol) {
  const double ys = y.dot(s);
  if (!(ys > curvature_tol * y.norm() * s.norm())) return false;
  const Vector Hs = hessian * s;
  const double sHs = s.dot(Hs);
  if (!(sHs > 0.0)) return false;
  hessian.noalias() += (y * y.transpose()) / ys;
  hessian.noalias() -= (Hs * Hs.transpose()) / sHs;
  hessian = 0.5 * (hessian + hessian.transpose()).eval();
  return true;
}

double duality_gap(const SpectralDecomposition& spec, const Vector& x_star, const Vector& u_star) {
  return gram_quadratic(spec, x_star) - dual_value(spec, u_star);
}

namespace {

double violation(const ConeH& cone, const Vector& x) {
  double v = 0.0;
  if (cone.num_ineq() > 0) v = std::max(v, (cone.ineq.transpose() * x).maxCoeff());
  if (cone.num_eq() > 0) v = std::max(v, (cone.eq.transpose() * x).cwiseAbs().maxCoeff());
  return v;
}

// Projected gradient on the free sphere ||z|| = r of a degenerate minimizer
// set, minimizing 1/2 sum max(0, c'x)^2 + 1/2 sum (b'x)^2.
Vector feasibility_on_free_sphere(const SpectralDecomposition& spec, const SphereQpSolution& sol,
                                  const ConeH& cone, const Vector& z0) {
  const IndexList& free = sol.free_indices;
  const Index f = static_cast<Index>(free.size());
  const Index n = spec.size();
  Matrix basis(n, f);
  for (Index k = 0; k < f; ++k) basis.col(k) = spec.phi.col(free[k]);
  const Vector fixed = spec.phi * sol.coeffs;

  Matrix normals(n, cone.num_ineq() + cone.num_eq());
  normals << cone.ineq, cone.eq;
  const Matrix reduced = basis.transpose() * normals;
  const double lip = reduced.cols() > 0 ? reduced.squaredNorm() : 1.0;
  const double eta = lip > 0.0 ? 1.0 / lip : 1.0;
  const double r = sol.free_radius;

  Vector z = z0;
  for (int it = 0; it < 500; ++it) {
    const Vector x = fixed + basis * z;
    Vector resid(normals.cols());
    if (cone.num_ineq() > 0)
      resid.head(cone.num_ineq()) = (cone.ineq.transpose() * x).cwiseMax(0.0);
    if (cone.num_eq() > 0) resid.tail(cone.num_eq()) = cone.eq.transpose() * x;
    if (resid.size() == 0 || resid.cwiseAbs().maxCoeff() == 0.0) break;
    Vector zn = z - eta * (reduced * resid);
    const double norm = zn.norm();
    if (norm == 0.0) break;
    zn *= r / norm;
    if ((zn - z).norm() < 1e-15) break;
    z = zn;
  }
  return fixed + basis * z;
}

}  // namespace

PrimalRecoveryResult recover_primal(const SpectralDecomposition& spec, const Vector& u_star,
                                    const ConeH& cone, const Vector& hint,
                                    const SolveOptions& opts, const ConeProjector* polar,
                                    const Matrix* gram) {
  const Index n = spec.size();
  const SphereQpSolution sol = solve_sphere_qp(spec, u_star);
  const Vector hint_phi =
      hint.size() == n ? Vector(spec.phi.transpose() * hint) : Vector(Vector::Ones(n));
  const double tol = opts.feasibility_tol;

  PrimalRecoveryResult out;
  Vector candidate = spec.phi * solution_representative(sol, hint_phi);

  if (!sol.degenerate) {
    if (member_h(cone, candidate, tol)) {
      out = {candidate, true, Recovery::DualRepresentative};
      return out;
    }
    // -x has the same Lagrangian value only when <u, x> = 0.
    const double comp = std::abs(u_star.dot(candidate));
    if (comp <= opts.complementarity_tol * (1.0 + u_star.norm()) &&
        member_h(cone, -candidate, tol)) {
      out = {-candidate, true, Recovery::DualRepresentative};
      return out;
    }
  } else if (sol.free_radius == 0.0 || sol.free_indices.size() == 1) {
    const Vector base = spec.phi * sol.coeffs;
    const Vector dir = spec.phi.col(sol.free_indices.front()) * sol.free_radius;
    for (const Vector& x : {Vector(candidate), Vector(base + dir), Vector(base - dir)}) {
      if (member_h(cone, x, tol)) return {x, true, Recovery::DualRepresentative};
    }
  } else {
    // Starts: the hint, then +/- each free axis.
    const Index f = static_cast<Index>(sol.free_indices.size());
    std::vector<Vector> starts;
    Vector z0(f);
    for (Index k = 0; k < f; ++k) z0[k] = candidate.dot(spec.phi.col(sol.free_indices[k]));
    starts.push_back(z0);
    for (Index k = 0; k < std::min<Index>(f, 8); ++k) {
      Vector e = Vector::Zero(f);
      e[k] = sol.free_radius;
      starts.push_back(e);
      starts.push_back(-e);
    }
    Vector best;
    double best_violation = std::numeric_limits<double>::infinity();
    for (const Vector& z : starts) {
      const Vector x = feasibility_on_free_sphere(spec, sol, cone, z);
      const double v = violation(cone, x);
      if (v < best_violation) {
        best_violation = v;
        best = x;
      }
      if (v <= tol) break;
    }
    if (best_violation <= tol) return {best / best.norm(), true, Recovery::DualRepresentative};
    candidate = best;
  }

  // No feasible point in the dual minimizer set: the dual bound is not tight.
  out.x = candidate;
  out.feasible = false;
  out.method = Recovery::Infeasible;
  if (opts.primal_fallback == PrimalFallback::None) return out;

  const Matrix G = gram ? *gram : Matrix(spec.phi * spec.lambdas.asDiagonal() * spec.phi.transpose());

  if (opts.primal_fallback == PrimalFallback::ExactFaces) {
    const FaceSearchResult faces = exact_face_minimum(G, cone, opts.max_faces);
    if (faces.complete) {
      if (!faces.found) throw InvalidInput("cone contains no unit vector (K = {0})");
      return {faces.x, true, Recovery::ExactFaces};
    }
  }

  std::optional<ConeProjector> local;
  if (!polar) polar = &local.emplace(polar_g(cone));
  std::vector<Vector> starts{candidate, -candidate};
  for (Index i = 1; i < std::min<Index>(n, 4); ++i) {
    starts.push_back(spec.phi.col(i));
    starts.push_back(-spec.phi.col(i));
  }
  PolishResult best;
  for (const Vector& x0 : starts) {
    const PolishResult p = local_polish(G, *polar, x0);
    if (p.found && (!best.found || p.value < best.value)) best = p;
  }
  if (best.found && member_h(cone, best.x, tol)) return {best.x, true, Recovery::LocalPolish};
  return out;
}

ConicSvResult solve(const Matrix& A, const ConeH& cone, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (A.size() == 0) throw InvalidInput("solve: empty matrix");
  if (A.cols() != cone.dim()) throw InvalidInput("solve: matrix and cone dimensions differ");
  if (!A.allFinite()) throw InvalidInput("solve: non-finite entries in A");
  const Index n = A.cols();

  const Matrix gram = A.transpose() * A;
  const SpectralDecomposition spec = decompose_symmetric(gram);
  const ConeG polar = polar_g(cone);
  const ConeProjector polar_proj(polar);
  // K = {0} exactly when K° = R^n, which needs at least n + 1 generators.
  if (polar.size() > n) {
    bool whole = true;
    for (Index i = 0; i < 2 * n && whole; ++i) {
      Vector y = Vector::Zero(n);
      y[i / 2] = i % 2 ? -1.0 : 1.0;
      whole = (y - polar_proj.project(y).point).norm() <= 1e-9;
    }
    if (whole) throw InvalidInput("cone contains no unit vector (K = {0})");
  }

  DualState st;
  st.u = Vector::Zero(n);
  if (opts.initial_u) {
    if (opts.initial_u->size() != n) throw InvalidInput("solve: initial_u has wrong dimension");
    st.u = polar_proj.project(*opts.initial_u).point;
  }
  st.h_inv = Matrix::Identity(n, n);
  st.hessian = Matrix::Identity(n, n);

  Vector hint = Vector::Ones(n);
  auto evaluate = [&](const Vector& u, const Vector& h, double& theta, Vector& g) {
    const SphereQpSolution sol = solve_sphere_qp(spec, u);
    theta = sol.value;
    g = spec.phi * solution_representative(sol, spec.phi.transpose() * h);
  };
  evaluate(st.u, hint, st.theta, st.g);

  ConicSvResult res;
  for (Index l = 1; l <= opts.max_iter; ++l) {
    st.iter = l;
    IterationRecord rec;
    rec.iter = l;

    Vector u_next = st.u;
    double theta_next = st.theta;
    bool accepted = false;

    if (opts.step_rule == StepRule::Literal) {
      StepResult step = literal_step(st, polar);
      u_next = step.u;
      theta_next = dual_value(spec, u_next);
      accepted = true;
      rec.step_scale = 1.0;
    } else {
      const std::optional<CenteredModel> model =
          polar.size() > 0 ? std::optional<CenteredModel>(std::in_place, st, polar) : std::nullopt;
      double t = 1.0;
      for (int h = 0; h <= opts.max_halvings && !accepted; ++h, t *= 0.5) {
        StepResult step = model ? model->step(polar, t) : StepResult{Vector::Zero(n), true, 0.0};
        if (!step.converged) step.u = polar_proj.project(st.u + t * st.g).point;
        const double theta_try = dual_value(spec, step.u);
        if (theta_try >= st.theta - opts.ascent_slack) {
          u_next = step.u;
          theta_next = theta_try;
          accepted = true;
          rec.step_scale = t;
        }
      }
      if (!accepted) {
        // Plain projected supergradient step 1/l, kept only if it ascends.
        const Vector u_try = polar_proj.project(st.u + st.g / static_cast<double>(l)).point;
        const double theta_try = dual_value(spec, u_try);
        rec.fallback_step = true;
        if (theta_try >= st.theta - opts.ascent_slack) {
          u_next = u_try;
          theta_next = theta_try;
          rec.step_scale = 1.0 / static_cast<double>(l);
        }
      }
    }

    const Vector s = u_next - st.u;
    rec.step_norm = s.norm();
    rec.s_norm = rec.step_norm;
    if (rec.step_norm < opts.eps) {
      st.u = u_next;
      st.theta = theta_next;
      if (rec.step_norm > 0.0) evaluate(st.u, s, st.theta, st.g);
      rec.theta = st.theta;
      res.loop_converged = true;
      if (opts.record_trace) res.trace.push_back(rec);
      break;
    }

    Vector g_next;
    evaluate(u_next, s, theta_next, g_next);
    const Vector y = st.g - g_next;  // gradient difference of -theta
    rec.update_applied = bfgs_update_inverse(st.h_inv, s, y, opts.curvature_tol);
    if (rec.update_applied) {
      bfgs_update_direct(st.hessian, s, y, opts.curvature_tol);
      rec.secant_residual = (st.h_inv * y - s).norm();
    }
    if (opts.trace_eigs) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(st.h_inv, Eigen::EigenvaluesOnly);
      rec.h_inv_min_eig = es.eigenvalues()[0];
    }
    st.u = u_next;
    st.theta = theta_next;
    st.g = g_next;
    hint = s;
    rec.theta = st.theta;
    if (opts.record_trace) res.trace.push_back(rec);
  }
  res.iters = st.iter;

  const PrimalRecoveryResult primal =
      recover_primal(spec, st.u, cone, hint, opts, &polar_proj, &gram);
  res.x_star = primal.x / primal.x.norm();
  res.u_star = st.u;
  res.recovery = primal.method;
  res.feasible = primal.feasible && member_h(cone, res.x_star, opts.feasibility_tol);
  const Vector Ax = A * res.x_star;
  res.primal_value = 0.5 * Ax.squaredNorm();
  res.sigma_min = Ax.norm();
  res.dual_value = st.theta;
  res.gap = res.primal_value - res.dual_value;
  res.complementarity = std::abs(res.u_star.dot(res.x_star));
  res.converged = res.loop_converged && res.feasible &&
                  res.gap <= opts.gap_tol * (1.0 + res.primal_value) &&
                  res.complementarity <= opts.complementarity_tol * (1.0 + res.u_star.norm());
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace conicsv
