#ifndef CONICSV_PRIMAL_HPP
#define CONICSV_PRIMAL_HPP

#include "conicsv/cones.hpp"

namespace conicsv {

// Primal-side searches over K ∩ sphere, used when no point of the dual
// minimizer set is feasible.

struct FaceSearchResult {
  bool found = false;
  // Every face was examined, so `found == false` proves K ∩ sphere is empty.
  bool complete = false;
  Vector x;
  double value = 0.0;  // 1/2 x'Gx
  Index faces_examined = 0;
};

// Enumerates the faces of a polyhedral cone (subsets of active
// inequalities, equalities always active). On a face's span the quadratic
// form is minimized by its smallest eigenvector; the global minimum over
// K ∩ sphere is the best feasible such candidate. Exact, but exponential in
// the number of inequalities: returns complete == false without searching
// when 2^m exceeds `max_faces`.
FaceSearchResult exact_face_minimum(const Matrix& gram, const ConeH& cone, Index max_faces);

struct PolishResult {
  bool found = false;
  Vector x;
  double value = 0.0;
  Index iterations = 0;
};

// Projected gradient on K ∩ sphere: x <- normalize(P_K(x - eta G x)), with
// P_K realized as y minus its projection onto the polar generators.
// Local method; the result is an attainable upper bound.
PolishResult local_polish(const Matrix& gram, const ConeProjector& polar, const Vector& x0,
                          Index max_iter = 300);

}  // namespace conicsv

#endif  // CONICSV_PRIMAL_HPP
