#ifndef CONICSV_CONES_HPP
#define CONICSV_CONES_HPP

#include "conicsv/common.hpp"
#include "conicsv/nnqp.hpp"

namespace conicsv {

// Half-space form {x : C'x <= 0, B'x = 0}. Columns of `ineq` and `eq` are the
// constraint normals; either block may have zero columns.
struct ConeH {
  Matrix ineq;  // n x m
  Matrix eq;    // n x r

  ConeH() = default;
  ConeH(Matrix c, Matrix b);
  // R^n (no constraints).
  static ConeH whole_space(Index n);
  static ConeH nonnegative_orthant(Index n);

  Index dim() const { return ineq.rows(); }
  Index num_ineq() const { return ineq.cols(); }
  Index num_eq() const { return eq.cols(); }
  bool unconstrained() const { return ineq.cols() == 0 && eq.cols() == 0; }
};

// Generator form {V lambda : lambda >= 0}; zero columns means {0}.
struct ConeG {
  Matrix gens;  // n x k

  Index dim() const { return gens.rows(); }
  Index size() const { return gens.cols(); }
};

// g_c C = I, g_b B = I, g_c B = 0 (and g_b C = 0).
struct LeftInverses {
  Matrix g_c;  // m x n
  Matrix g_b;  // r x n
};

// Raised when the half-space description is not reducible (dependent normals).
class ConeRankError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

LeftInverses left_inverses(const ConeH& cone);

// Polar cone in half-space form: {y : -g_c y <= 0, (I - C g_c - B g_b) y = 0}.
// The equality block is returned as-is (n columns, typically rank deficient);
// pass the result through `reduce_equalities` before reusing it as input.
ConeH polar_h(const ConeH& cone);

// Polar cone in generator form: columns [C, B, -B].
ConeG polar_g(const ConeH& cone);

// Replaces the equality normals by an orthonormal basis of their span.
ConeH reduce_equalities(const ConeH& cone, double rank_tol = 1e-10);

bool member_h(const ConeH& cone, const Vector& x, double tol);
bool member_g(const ConeG& cone, const Vector& y, double tol);

// Default membership tolerance 1e-9 * (1 + ||x||).
double default_member_tol(const Vector& x);

struct Projection {
  Vector point;
  Vector weights;  // lambda >= 0 with point = V lambda
  double kkt_residual = 0.0;
  Index iterations = 0;
  bool converged = false;  // false flags an exhausted iteration cap
};

// Euclidean projection onto a generator cone. Holds the Gram matrix V'V so
// that repeated projections onto the same cone cost O(nk) plus the NNLS.
class ConeProjector {
 public:
  explicit ConeProjector(ConeG cone, double kkt_tol = 1e-10);

  const ConeG& cone() const { return cone_; }
  Index dim() const { return cone_.dim(); }

  // Projection of y onto the cone; `warm` seeds the NNLS weights.
  Projection project(const Vector& y, const Vector& warm = Vector()) const;
  // y minus its projection onto the cone. When the cone is the polar of K this
  // is the projection onto K (Moreau decomposition).
  Vector project_onto_polar(const Vector& y) const;

 private:
  ConeG cone_;
  Matrix gram_;
  NnqpOptions opts_;
};

Projection project_g(const ConeG& cone, const Vector& y);

}  // namespace conicsv

#endif  // CONICSV_CONES_HPP
