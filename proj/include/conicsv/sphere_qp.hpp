#ifndef CONICSV_SPHERE_QP_HPP
#define CONICSV_SPHERE_QP_HPP

#include <optional>

#include "conicsv/common.hpp"

namespace conicsv {

// Closed-form minimization of the Lagrangian
//
//   L(x, u) = 1/2 ||Ax||^2 + <u, x>   over   ||x||_2 = 1
//
// in the eigenbasis of the Gram matrix A'A. Writing x = phi c and
// gamma = phi' u, the problem separates into 1/2 sum lambda_i c_i^2 +
// sum gamma_i c_i on the unit sphere.

// Eigenpairs of A'A, eigenvalues ascending.
struct SpectralDecomposition {
  Vector lambdas;
  Matrix phi;  // orthonormal columns; first nonzero entry of each is positive
  double multiplicity_tol = 0.0;

  Index size() const { return lambdas.size(); }
};

// Split of the spectrum into the smallest eigenvalue cluster and the rest.
struct EigsplitIndex {
  IndexList e1;
  IndexList e_plus;
};

struct SphereQpSolution {
  Vector coeffs;  // c* in the phi basis; zero on free_indices when degenerate
  double multiplier = 0.0;
  bool degenerate = false;
  double free_radius = 0.0;
  IndexList free_indices;
  double value = 0.0;
};

enum class QpCase { Degenerate, Nondegenerate };

struct Classification {
  QpCase label = QpCase::Degenerate;
  Vector gammas;
};

// Thrown when the secular equation has no root below lambda_1, which means
// the instance should have been classified degenerate.
class SecularBracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Default grouping tolerance 1e-8 * (1 + lambda_max).
double default_multiplicity_tol(const Vector& lambdas);

SpectralDecomposition decompose_gram(const Matrix& A,
                                     std::optional<double> multiplicity_tol = std::nullopt);
// Same, for an already-formed symmetric positive semidefinite matrix.
SpectralDecomposition decompose_symmetric(const Matrix& G,
                                          std::optional<double> multiplicity_tol = std::nullopt);

EigsplitIndex eigsplit(const Vector& lambdas, double multiplicity_tol);

// f(mu) = sum gamma_i^2 / (lambda_i - mu)^2.
double secular_function(const Vector& lambdas, const Vector& gammas, double mu);

// Root of f(mu) = 1 on (-inf, lambda_1), by bisection on
// [lambda_1 - ||gamma||, lambda_1].
double secular_root(const Vector& lambdas, const Vector& gammas, double multiplicity_tol,
                    double root_tol = 1e-12);

Classification classify_gammas(const Vector& lambdas, const Vector& gammas,
                               double multiplicity_tol);
Classification classify(const SpectralDecomposition& spec, const Vector& u);

// Solver in eigen-coordinates; `solve_sphere_qp` projects u first.
SphereQpSolution solve_sphere_qp_gammas(const Vector& lambdas, const Vector& gammas,
                                        double multiplicity_tol);
SphereQpSolution solve_sphere_qp(const SpectralDecomposition& spec, const Vector& u);

// theta(u) = min over the unit sphere of L(x, u).
double dual_value(const SpectralDecomposition& spec, const Vector& u);

// A point of the minimizer set in phi coordinates. In the degenerate case the
// free coordinates follow the E1 part of `direction_hint` (also phi
// coordinates); a hint vanishing on E1 selects the first E1 coordinate.
Vector solution_representative(const SphereQpSolution& sol, const Vector& direction_hint);

// 1/2 x'A'Ax evaluated through the decomposition.
double gram_quadratic(const SpectralDecomposition& spec, const Vector& x);

// L(x, u) through the decomposition.
double lagrangian(const SpectralDecomposition& spec, const Vector& x, const Vector& u);

}  // namespace conicsv

#endif  // CONICSV_SPHERE_QP_HPP
