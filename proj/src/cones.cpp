#include "conicsv/cones.hpp"

#include <algorithm>
#include <cmath>

namespace conicsv {

ConeH::ConeH(Matrix c, Matrix b) : ineq(std::move(c)), eq(std::move(b)) {
  if (ineq.rows() != eq.rows()) {
    if (ineq.cols() == 0 && ineq.rows() == 0)
      ineq.resize(eq.rows(), 0);
    else if (eq.cols() == 0 && eq.rows() == 0)
      eq.resize(ineq.rows(), 0);
    else
      throw InvalidInput("ConeH: inequality and equality blocks disagree on dimension");
  }
  if (!ineq.allFinite() || !eq.allFinite()) throw InvalidInput("ConeH: non-finite normal");
}

ConeH ConeH::whole_space(Index n) { return ConeH(Matrix(n, 0), Matrix(n, 0)); }

ConeH ConeH::nonnegative_orthant(Index n) {
  return ConeH(-Matrix::Identity(n, n), Matrix(n, 0));
}

namespace {

Index column_rank(const Matrix& M) {
  if (M.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(M);
  qr.setThreshold(1e-10);
  return qr.rank();
}

// (M'WM)^{-1} M'W for a symmetric projector W.
Matrix weighted_left_inverse(const Matrix& M, const Matrix& W, const char* what) {
  const Matrix WM = W * M;
  const Matrix normal = M.transpose() * WM;
  Eigen::LDLT<Matrix> ldlt(normal);
  const double scale = std::max(1.0, normal.diagonal().cwiseAbs().maxCoeff());
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().cwiseAbs().minCoeff() <= 1e-12 * scale ||
      column_rank(WM) < M.cols())
    throw ConeRankError(what);
  return ldlt.solve(WM.transpose());
}

Matrix complement_projector(const Matrix& M) {
  const Index n = M.rows();
  if (M.cols() == 0) return Matrix::Identity(n, n);
  Eigen::HouseholderQR<Matrix> qr(M);
  const Matrix Q = qr.householderQ() * Matrix::Identity(n, M.cols());
  return Matrix::Identity(n, n) - Q * Q.transpose();
}

}  // namespace

LeftInverses left_inverses(const ConeH& cone) {
  const Matrix& C = cone.ineq;
  const Matrix& B = cone.eq;
  if (column_rank(C) < C.cols() || column_rank(B) < B.cols())
    throw ConeRankError("cone representation not reducible; remove redundant constraints");

  LeftInverses li;
  const Index n = cone.dim();
  li.g_c = C.cols() == 0 ? Matrix(0, n)
                         : weighted_left_inverse(C, complement_projector(B),
                                                 "inequality normals not independent modulo equalities");
  li.g_b = B.cols() == 0 ? Matrix(0, n)
                         : weighted_left_inverse(B, complement_projector(C),
                                                 "equality normals not independent modulo inequalities");
  return li;
}

ConeH polar_h(const ConeH& cone) {
  const LeftInverses li = left_inverses(cone);
  const Index n = cone.dim();
  Matrix E = Matrix::Identity(n, n);
  if (cone.num_ineq() > 0) E -= cone.ineq * li.g_c;
  if (cone.num_eq() > 0) E -= cone.eq * li.g_b;
  return ConeH(Matrix(-li.g_c.transpose()), Matrix(E.transpose()));
}

ConeG polar_g(const ConeH& cone) {
  const Index n = cone.dim();
  ConeG g;
  g.gens.resize(n, cone.num_ineq() + 2 * cone.num_eq());
  g.gens.leftCols(cone.num_ineq()) = cone.ineq;
  g.gens.middleCols(cone.num_ineq(), cone.num_eq()) = cone.eq;
  g.gens.rightCols(cone.num_eq()) = -cone.eq;
  return g;
}

ConeH reduce_equalities(const ConeH& cone, double rank_tol) {
  const Index n = cone.dim();
  if (cone.num_eq() == 0) return cone;
  Eigen::JacobiSVD<Matrix> svd(cone.eq, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  const double cutoff = rank_tol * std::max(1.0, s.size() > 0 ? s[0] : 0.0);
  Index rank = 0;
  while (rank < s.size() && s[rank] > cutoff) ++rank;
  Matrix basis = svd.matrixU().leftCols(rank);
  for (Index j = 0; j < basis.cols(); ++j) {
    Index pivot = 0;
    basis.col(j).cwiseAbs().maxCoeff(&pivot);
    if (basis(pivot, j) < 0.0) basis.col(j) *= -1.0;
  }
  return ConeH(cone.ineq, basis.size() == 0 ? Matrix(n, 0) : basis);
}

double default_member_tol(const Vector& x) { return 1e-9 * (1.0 + x.norm()); }

bool member_h(const ConeH& cone, const Vector& x, double tol) {
  if (x.size() != cone.dim()) throw InvalidInput("member_h: dimension mismatch");
  if (cone.num_ineq() > 0 && (cone.ineq.transpose() * x).maxCoeff() > tol) return false;
  if (cone.num_eq() > 0 && (cone.eq.transpose() * x).cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

ConeProjector::ConeProjector(ConeG cone, double kkt_tol) : cone_(std::move(cone)) {
  gram_ = cone_.gens.transpose() * cone_.gens;
  opts_.kkt_tol = kkt_tol;
  const Index k = cone_.size();
  opts_.max_iter = 10 * k * std::max<Index>(cone_.dim(), 1);
}

Projection ConeProjector::project(const Vector& y, const Vector& warm) const {
  if (y.size() != cone_.dim()) throw InvalidInput("project_g: dimension mismatch");
  Projection p;
  if (cone_.size() == 0) {
    p.point = Vector::Zero(y.size());
    p.weights = Vector(0);
    p.converged = true;
    return p;
  }
  const Vector q = -(cone_.gens.transpose() * y);
  const NnqpResult r = solve_nnqp(gram_, q, opts_, warm);
  p.weights = r.x;
  p.point = cone_.gens * r.x;
  p.kkt_residual = r.kkt_residual;
  p.iterations = r.iterations;
  p.converged = r.converged;
  return p;
}

Vector ConeProjector::project_onto_polar(const Vector& y) const { return y - project(y).point; }

Projection project_g(const ConeG& cone, const Vector& y) {
  return ConeProjector(cone, 1e-8).project(y);
}

bool member_g(const ConeG& cone, const Vector& y, double tol) {
  if (y.size() != cone.dim()) throw InvalidInput("member_g: dimension mismatch");
  const Projection p = ConeProjector(cone, 1e-12).project(y);
  return (y - p.point).norm() <= tol * (1.0 + y.norm());
}

}  // namespace conicsv
