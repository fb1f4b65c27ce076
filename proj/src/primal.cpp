#include "conicsv/primal.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <limits>

namespace conicsv {

namespace {

double normal_scale(const ConeH& cone) {
  double s = 0.0;
  if (cone.num_ineq() > 0) s = std::max(s, cone.ineq.colwise().norm().maxCoeff());
  if (cone.num_eq() > 0) s = std::max(s, cone.eq.colwise().norm().maxCoeff());
  return s;
}

// Power iteration, padded by 1% so that 1/estimate stays a safe step.
double spectral_norm_estimate(const Matrix& sym) {
  Vector v = Vector::Ones(sym.rows()) / std::sqrt(static_cast<double>(sym.rows()));
  double est = 0.0;
  for (int it = 0; it < 30; ++it) {
    const Vector w = sym * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    est = norm;
    v = w / norm;
  }
  return 1.01 * est;
}

}  // namespace

FaceSearchResult exact_face_minimum(const Matrix& gram, const ConeH& cone, Index max_faces) {
  FaceSearchResult out;
  const Index n = cone.dim();
  const Index m = cone.num_ineq();
  const Index r = cone.num_eq();
  if (m >= 62 || (Index{1} << m) > max_faces) return out;

  const double feas_tol = 1e-9 * (1.0 + normal_scale(cone));
  const std::uint64_t faces = std::uint64_t{1} << m;
  double best = std::numeric_limits<double>::infinity();

  for (std::uint64_t mask = 0; mask < faces; ++mask) {
    ++out.faces_examined;
    const Index active = std::popcount(mask);
    Matrix M(n, active + r);
    Index col = 0;
    for (Index j = 0; j < m; ++j)
      if (mask & (std::uint64_t{1} << j)) M.col(col++) = cone.ineq.col(j);
    M.rightCols(r) = cone.eq;

    Matrix Z;
    if (M.cols() == 0) {
      Z = Matrix::Identity(n, n);
    } else {
      Eigen::ColPivHouseholderQR<Matrix> qr(M);
      qr.setThreshold(1e-10);
      const Index rank = qr.rank();
      if (rank >= n) continue;
      const Matrix Q = qr.householderQ();
      Z = Q.rightCols(n - rank);
    }

    const Matrix H = Z.transpose() * gram * Z;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.transpose()));
    const Vector& evals = es.eigenvalues();
    const double cluster = evals[0] + 1e-10 * (1.0 + std::abs(evals[evals.size() - 1]));
    for (Index k = 0; k < evals.size() && evals[k] <= cluster; ++k) {
      Vector x = Z * es.eigenvectors().col(k);
      x.normalize();
      for (int sign : {1, -1}) {
        const Vector cand = static_cast<double>(sign) * x;
        if (!member_h(cone, cand, feas_tol)) continue;
        const double value = 0.5 * cand.dot(gram * cand);
        if (value < best) {
          best = value;
          out.x = cand;
          out.value = value;
          out.found = true;
        }
      }
    }
  }
  out.complete = true;
  return out;
}

PolishResult local_polish(const Matrix& gram, const ConeProjector& polar, const Vector& x0,
                          Index max_iter) {
  PolishResult out;
  Vector x = polar.project_onto_polar(x0);
  double norm = x.norm();
  if (norm <= 1e-12 * (1.0 + x0.norm())) return out;
  x /= norm;

  const double gnorm = spectral_norm_estimate(gram);
  const double eta = gnorm > 0.0 ? 1.0 / gnorm : 1.0;

  out.found = true;
  out.x = x;
  out.value = 0.5 * x.dot(gram * x);
  for (Index it = 0; it < max_iter; ++it) {
    const Vector y = x - eta * (gram * x);
    Vector p = polar.project_onto_polar(y);
    norm = p.norm();
    if (norm <= 1e-14) break;
    p /= norm;
    const double value = 0.5 * p.dot(gram * p);
    out.iterations = it + 1;
    const double move = (p - x).norm();
    x = p;
    if (value < out.value) {
      out.value = value;
      out.x = x;
    }
    if (move < 1e-12) break;
  }
  return out;
}

}  // namespace conicsv
