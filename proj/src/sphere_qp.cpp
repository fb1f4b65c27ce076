#include "conicsv/sphere_qp.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace conicsv {

double default_multiplicity_tol(const Vector& lambdas) {
  const double top = lambdas.size() > 0 ? std::abs(lambdas[lambdas.size() - 1]) : 0.0;
  return 1e-8 * (1.0 + top);
}

namespace {

void fix_signs(Matrix& phi) {
  for (Index j = 0; j < phi.cols(); ++j) {
    const double scale = phi.col(j).cwiseAbs().maxCoeff();
    for (Index i = 0; i < phi.rows(); ++i) {
      if (std::abs(phi(i, j)) > 1e-12 * scale) {
        if (phi(i, j) < 0.0) phi.col(j) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace

SpectralDecomposition decompose_symmetric(const Matrix& G, std::optional<double> multiplicity_tol) {
  if (G.rows() == 0 || G.rows() != G.cols())
    throw InvalidInput("decompose_symmetric: expected a nonempty square matrix");
  if (!G.allFinite()) throw InvalidInput("decompose_symmetric: non-finite entries");

  const Index n = G.rows();
  SpectralDecomposition spec;
  spec.phi = 0.5 * (G + G.transpose());
  spec.lambdas.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n),
                                         spec.phi.data(), static_cast<lapack_int>(n),
                                         spec.lambdas.data());
  if (info != 0) throw InvalidInput("decompose_symmetric: eigendecomposition failed");
  fix_signs(spec.phi);
  spec.multiplicity_tol = multiplicity_tol.value_or(default_multiplicity_tol(spec.lambdas));
  return spec;
}

SpectralDecomposition decompose_gram(const Matrix& A, std::optional<double> multiplicity_tol) {
  if (A.size() == 0) throw InvalidInput("decompose_gram: empty matrix");
  if (!A.allFinite()) throw InvalidInput("decompose_gram: non-finite entries in A");
  return decompose_symmetric(A.transpose() * A, multiplicity_tol);
}

EigsplitIndex eigsplit(const Vector& lambdas, double multiplicity_tol) {
  EigsplitIndex split;
  const double cutoff = lambdas[0] + multiplicity_tol;
  for (Index i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] <= cutoff)
      split.e1.push_back(i);
    else
      split.e_plus.push_back(i);
  }
  return split;
}

double secular_function(const Vector& lambdas, const Vector& gammas, double mu) {
  double f = 0.0;
  for (Index i = 0; i < lambdas.size(); ++i) {
    const double t = gammas[i] / (lambdas[i] - mu);
    f += t * t;
  }
  return f;
}

double secular_root(const Vector& lambdas, const Vector& gammas, double multiplicity_tol,
                    double root_tol) {
  (void)multiplicity_tol;
  const double norm = gammas.norm();
  if (norm == 0.0) throw SecularBracketError("secular_root: all gammas vanish");
  const double lambda1 = lambdas[0];

  double lo = lambda1 - norm;  // f(lo) <= 1 termwise
  double hi = lambda1;
  double f_lo = secular_function(lambdas, gammas, lo);
  if (std::abs(f_lo - 1.0) <= root_tol) return lo;
  if (f_lo > 1.0 + 1e-9) throw SecularBracketError("secular_root: lower bracket violated");

  double best = lo;
  double best_res = std::abs(f_lo - 1.0);
  bool crossed = false;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = secular_function(lambdas, gammas, mid);
    const double res = std::abs(fm - 1.0);
    if (res < best_res) {
      best_res = res;
      best = mid;
    }
    if (res <= root_tol) return mid;
    if (fm < 1.0) {
      lo = mid;
    } else {
      hi = mid;
      crossed = true;
    }
  }
  if (!crossed)
    throw SecularBracketError(
        "secular_root: no root below lambda_1; reclassify with a larger tolerance");
  return best;
}

Classification classify_gammas(const Vector& lambdas, const Vector& gammas,
                               double multiplicity_tol) {
  Classification out;
  out.gammas = gammas;
  const EigsplitIndex split = eigsplit(lambdas, multiplicity_tol);
  const double zero_tol = multiplicity_tol * gammas.norm();
  const double lambda1 = lambdas[0];

  bool vanish_on_e1 = true;
  for (Index i : split.e1) {
    if (std::abs(gammas[i]) > zero_tol) {
      vanish_on_e1 = false;
      break;
    }
  }
  double sum = 0.0;
  for (Index i : split.e_plus) {
    const double t = gammas[i] / (lambdas[i] - lambda1);
    sum += t * t;
  }
  out.label = (vanish_on_e1 && sum <= 1.0) ? QpCase::Degenerate : QpCase::Nondegenerate;
  return out;
}

Classification classify(const SpectralDecomposition& spec, const Vector& u) {
  if (u.size() != spec.size()) throw InvalidInput("classify: dimension mismatch");
  return classify_gammas(spec.lambdas, spec.phi.transpose() * u, spec.multiplicity_tol);
}

SphereQpSolution solve_sphere_qp_gammas(const Vector& lambdas, const Vector& gammas,
                                        double multiplicity_tol) {
  const Index n = lambdas.size();
  if (gammas.size() != n) throw InvalidInput("solve_sphere_qp: dimension mismatch");
  const Classification cls = classify_gammas(lambdas, gammas, multiplicity_tol);
  const double lambda1 = lambdas[0];

  SphereQpSolution sol;
  sol.coeffs = Vector::Zero(n);

  if (cls.label == QpCase::Degenerate) {
    const EigsplitIndex split = eigsplit(lambdas, multiplicity_tol);
    sol.degenerate = true;
    sol.multiplier = lambda1;
    double used = 0.0;
    double value = 0.0;
    for (Index i : split.e_plus) {
      const double c = -gammas[i] / (lambdas[i] - lambda1);
      sol.coeffs[i] = c;
      used += c * c;
      value += 0.5 * lambdas[i] * c * c + gammas[i] * c;
    }
    sol.free_radius = std::sqrt(std::max(0.0, 1.0 - used));
    sol.free_indices = split.e1;
    sol.value = value + 0.5 * lambda1 * sol.free_radius * sol.free_radius;
    return sol;
  }

  const double mu = secular_root(lambdas, gammas, multiplicity_tol);
  sol.degenerate = false;
  sol.multiplier = mu;
  for (Index i = 0; i < n; ++i) sol.coeffs[i] = -gammas[i] / (lambdas[i] - mu);
  sol.coeffs /= sol.coeffs.norm();
  double value = 0.0;
  for (Index i = 0; i < n; ++i)
    value += 0.5 * lambdas[i] * sol.coeffs[i] * sol.coeffs[i] + gammas[i] * sol.coeffs[i];
  sol.value = value;
  return sol;
}

SphereQpSolution solve_sphere_qp(const SpectralDecomposition& spec, const Vector& u) {
  if (u.size() != spec.size()) throw InvalidInput("solve_sphere_qp: dimension mismatch");
  return solve_sphere_qp_gammas(spec.lambdas, spec.phi.transpose() * u, spec.multiplicity_tol);
}

double dual_value(const SpectralDecomposition& spec, const Vector& u) {
  return solve_sphere_qp(spec, u).value;
}

Vector solution_representative(const SphereQpSolution& sol, const Vector& direction_hint) {
  Vector c = sol.coeffs;
  if (!sol.degenerate || sol.free_indices.empty()) return c;

  double hint_norm2 = 0.0;
  if (direction_hint.size() == c.size())
    for (Index i : sol.free_indices) hint_norm2 += direction_hint[i] * direction_hint[i];

  if (hint_norm2 > 0.0) {
    const double scale = sol.free_radius / std::sqrt(hint_norm2);
    for (Index i : sol.free_indices) c[i] = scale * direction_hint[i];
  } else {
    c[sol.free_indices.front()] = sol.free_radius;
  }
  return c;
}

double gram_quadratic(const SpectralDecomposition& spec, const Vector& x) {
  const Vector c = spec.phi.transpose() * x;
  return 0.5 * c.dot(spec.lambdas.cwiseProduct(c));
}

double lagrangian(const SpectralDecomposition& spec, const Vector& x, const Vector& u) {
  return gram_quadratic(spec, x) + u.dot(x);
}

}  // namespace conicsv
