#include "conicsv/gridapp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>

namespace conicsv {

std::vector<StructuredCoordinate> structured_coordinates(Index n_bus) {
  std::vector<StructuredCoordinate> map;
  map.reserve(static_cast<std::size_t>(n_bus * n_bus));
  for (Index i = 0; i < n_bus; ++i)
    map.push_back({StructuredCoordinate::Symmetric, i, i, 1.0});
  for (Index i = 0; i < n_bus; ++i)
    for (Index j = i + 1; j < n_bus; ++j)
      map.push_back({StructuredCoordinate::Symmetric, i, j, std::numbers::sqrt2});
  for (Index i = 0; i < n_bus; ++i)
    for (Index j = i + 1; j < n_bus; ++j)
      map.push_back({StructuredCoordinate::Antisymmetric, i, j, std::numbers::sqrt2});
  return map;
}

Vector to_structured_vector(const Matrix& X, Index n_bus) {
  if (X.rows() != 2 * n_bus || X.cols() != 2 * n_bus)
    throw InvalidInput("to_structured_vector: expected a 2N x 2N matrix");
  const auto map = structured_coordinates(n_bus);
  Vector w(static_cast<Index>(map.size()));
  for (std::size_t k = 0; k < map.size(); ++k) {
    const auto& c = map[k];
    const double entry = c.kind == StructuredCoordinate::Symmetric ? X(c.row, c.col)
                                                                   : X(c.row, n_bus + c.col);
    w[static_cast<Index>(k)] = c.scale * entry;
  }
  return w;
}

Matrix from_structured_vector(const Vector& w, Index n_bus) {
  if (w.size() != n_bus * n_bus) throw InvalidInput("from_structured_vector: expected N^2 entries");
  const auto map = structured_coordinates(n_bus);
  Matrix S = Matrix::Zero(n_bus, n_bus);
  Matrix K = Matrix::Zero(n_bus, n_bus);
  for (std::size_t k = 0; k < map.size(); ++k) {
    const auto& c = map[k];
    const double v = w[static_cast<Index>(k)] / c.scale;
    if (c.kind == StructuredCoordinate::Symmetric) {
      S(c.row, c.col) = v;
      S(c.col, c.row) = v;
    } else {
      K(c.row, c.col) = v;
      K(c.col, c.row) = -v;
    }
  }
  Matrix X(2 * n_bus, 2 * n_bus);
  X << S, K, -K, S;
  return X;
}

Matrix project_structured(const Matrix& X) {
  const Index n2 = X.rows();
  if (n2 % 2 != 0 || X.cols() != n2) throw InvalidInput("project_structured: expected 2N x 2N");
  const Index n = n2 / 2;
  const Matrix avg = 0.5 * (X.topLeftCorner(n, n) + X.bottomRightCorner(n, n));
  const Matrix S = 0.5 * (avg + avg.transpose());
  const Matrix off = 0.5 * (X.topRightCorner(n, n) - X.bottomLeftCorner(n, n));
  const Matrix K = 0.5 * (off - off.transpose());
  Matrix P(n2, n2);
  P << S, K, -K, S;
  return P;
}

Matrix realify_matrix(const ComplexMatrix& W) {
  const Index n = W.rows();
  Matrix X(2 * n, 2 * n);
  X << W.real(), W.imag(), -W.imag(), W.real();
  return X;
}

RealifiedModel realify(const MeasurementModel& model) {
  if (model.h_list.empty()) throw InvalidInput("realify: model has no measurements");
  const Index n = model.num_buses();
  if (n < 1) throw InvalidInput("realify: empty measurement operator");

  RealifiedModel out;
  out.n_bus = n;
  out.vec_dim = n * n;
  out.t_map = structured_coordinates(n);
  out.h.resize(out.vec_dim, model.num_measurements());
  for (Index l = 0; l < model.num_measurements(); ++l) {
    const ComplexMatrix& H = model.h_list[static_cast<std::size_t>(l)];
    if (H.rows() != n || H.cols() != n)
      throw InvalidInput("realify: measurement operators must all be N x N");
    const double scale = 1.0 + H.cwiseAbs().maxCoeff();
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw InvalidInput("realify: measurement operator " + std::to_string(l + 1) +
                         " is not Hermitian");
    out.hh_list.push_back(realify_matrix(H));
    out.h.col(l) = to_structured_vector(out.hh_list.back(), n);
  }
  return out;
}

Matrix information_matrix(const RealifiedModel& model, const Vector& delta) {
  if (delta.size() != model.h.cols())
    throw InvalidInput("information_matrix: delta must have one entry per measurement");
  if (delta.size() > 0 && (delta.minCoeff() < 0.0 || delta.maxCoeff() > 1.0))
    throw InvalidInput("information_matrix: delta must lie in [0, 1]");
  return 2.0 * model.h * delta.asDiagonal() * model.h.transpose();
}

ConeH tangent_cone(const RealifiedModel& model, const Vector& w0, double kernel_tol) {
  if (w0.size() != model.vec_dim) throw InvalidInput("tangent_cone: w0 must have N^2 entries");
  const Matrix X0 = from_structured_vector(w0, model.n_bus);
  Eigen::SelfAdjointEigenSolver<Matrix> es(X0);
  const Vector& evals = es.eigenvalues();
  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
  if (evals[0] < -kernel_tol * scale)
    throw InvalidInput("tangent_cone: reference point is not positive semidefinite");

  std::vector<Vector> normals;
  for (Index k = 0; k < evals.size() && evals[k] < kernel_tol * scale; ++k) {
    const Vector u = es.eigenvectors().col(k);
    Vector normal = -to_structured_vector(project_structured(u * u.transpose()), model.n_bus);
    normal.normalize();
    bool duplicate = false;
    for (const Vector& other : normals)
      if (other.dot(normal) > 1.0 - 1e-9) duplicate = true;
    if (!duplicate) normals.push_back(normal);
  }

  Matrix C(model.vec_dim, static_cast<Index>(normals.size()));
  for (std::size_t j = 0; j < normals.size(); ++j) C.col(static_cast<Index>(j)) = normals[j];
  return ConeH(C, Matrix(model.vec_dim, 0));
}

Matrix psd_sqrt(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()));
  const Vector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

DesignEvaluation evaluate_design(const RealifiedModel& model, const Vector& delta, const Vector& w0,
                                 const SolveOptions& opts) {
  const Matrix info = information_matrix(model, delta);
  const ConeH cone = tangent_cone(model, w0);
  DesignEvaluation out;
  out.solve = solve(psd_sqrt(info), cone, opts);
  out.objective = out.solve.sigma_min * out.solve.sigma_min;
  return out;
}

double design_objective(const RealifiedModel& model, const Vector& delta, const Vector& w0,
                        const SolveOptions& opts) {
  return evaluate_design(model, delta, w0, opts).objective;
}

Vector greedy_design(const RealifiedModel& model, const Vector& w0, Index budget, Backend backend,
                     const SolveOptions& opts) {
  const Index L = model.h.cols();
  if (budget < 1 || budget > L) throw InvalidInput("greedy_design: budget must be in [1, L]");
  Vector delta = Vector::Zero(L);
  std::vector<double> scores(static_cast<std::size_t>(L));

  for (Index round = 0; round < budget; ++round) {
    auto score = [&](Index c) {
      if (delta[c] != 0.0) return -std::numeric_limits<double>::infinity();
      Vector trial = delta;
      trial[c] = 1.0;
      return design_objective(model, trial, w0, opts);
    };
    if (backend == Backend::OpenMP) {
#ifdef CONICSV_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
      for (Index c = 0; c < L; ++c) scores[static_cast<std::size_t>(c)] = score(c);
    } else {
      for (Index c = 0; c < L; ++c) scores[static_cast<std::size_t>(c)] = score(c);
    }

    Index pick = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (Index c = 0; c < L; ++c) {
      const double s = scores[static_cast<std::size_t>(c)];
      if (delta[c] != 0.0) continue;
      if (pick < 0 || s > best + 1e-12 * (1.0 + std::abs(best))) {
        pick = c;
        best = s;
      }
    }
    delta[pick] = 1.0;
  }
  return delta;
}

}  // namespace conicsv
