#include "conicsv/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "conicsv/rng.hpp"

#ifdef CONICSV_HAVE_OPENMP
#include <omp.h>
#endif

namespace conicsv {

const char* to_string(OracleMethod m) {
  return m == OracleMethod::Grid ? "grid" : "projected_gradient";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GridBest {
  double value = kInf;
  std::int64_t index = -1;
  Vector point;
  Index feasible = 0;

  void offer(double v, std::int64_t idx, const Vector& p) {
    if (v < value || (v == value && idx < index)) {
      value = v;
      index = idx;
      point = p;
    }
  }
};

// Angular grid of the unit sphere in R^p, p in {1, 2, 3}. Points are indexed
// row-major over (polar, azimuth). `eval` returns +inf for rejected points.
// Both backends visit the same points with the same arithmetic and break ties
// by the smallest index, so their results agree bit for bit.
template <class Eval>
GridBest scan_sphere(int p, double h, const Eval& eval, Backend backend) {
  GridBest best;
  if (p == 1) {
    for (int k = 0; k < 2; ++k) {
      Vector x(1);
      x[0] = k == 0 ? 1.0 : -1.0;
      const double v = eval(x);
      if (v < kInf) {
        ++best.feasible;
        best.offer(v, k, x);
      }
    }
    return best;
  }

  const std::int64_t n_az = static_cast<std::int64_t>(std::ceil(2.0 * std::numbers::pi / h));
  std::vector<double> cos_az(n_az), sin_az(n_az);
  for (std::int64_t j = 0; j < n_az; ++j) {
    cos_az[j] = std::cos(static_cast<double>(j) * h);
    sin_az[j] = std::sin(static_cast<double>(j) * h);
  }

  if (p == 2) {
    // Small enough to stay serial.
    Vector x(2);
    for (std::int64_t j = 0; j < n_az; ++j) {
      x << cos_az[j], sin_az[j];
      const double v = eval(x);
      if (v < kInf) {
        ++best.feasible;
        best.offer(v, j, x);
      }
    }
    return best;
  }

  const std::int64_t n_pol = static_cast<std::int64_t>(std::ceil(std::numbers::pi / h)) + 1;
  auto polar_angle = [&](std::int64_t i) {
    return std::min(static_cast<double>(i) * h, std::numbers::pi);
  };

  auto scan_rows = [&](std::int64_t begin, std::int64_t end, std::int64_t stride, GridBest& local) {
    Vector x(3);
    for (std::int64_t i = begin; i < end; i += stride) {
      const double th = polar_angle(i);
      const double st = std::sin(th);
      const double ct = std::cos(th);
      for (std::int64_t j = 0; j < n_az; ++j) {
        x << st * cos_az[j], st * sin_az[j], ct;
        const double v = eval(x);
        if (v < kInf) {
          ++local.feasible;
          local.offer(v, i * n_az + j, x);
        }
      }
    }
  };

#ifdef CONICSV_HAVE_OPENMP
  if (backend == Backend::OpenMP) {
#pragma omp parallel
    {
      GridBest local;
      const std::int64_t tid = omp_get_thread_num();
      const std::int64_t nth = omp_get_num_threads();
      scan_rows(tid, n_pol, nth, local);
#pragma omp critical(conicsv_grid_merge)
      {
        best.feasible += local.feasible;
        if (local.index >= 0) best.offer(local.value, local.index, local.point);
      }
    }
    return best;
  }
#else
  (void)backend;
#endif
  scan_rows(0, n_pol, 1, best);
  return best;
}

Matrix null_space_basis(const Matrix& B, Index n) {
  if (B.cols() == 0) return Matrix::Identity(n, n);
  Eigen::ColPivHouseholderQR<Matrix> qr(B);
  qr.setThreshold(1e-10);
  const Index rank = qr.rank();
  const Matrix Q = qr.householderQ();
  return Q.rightCols(n - rank);
}

double largest_eigenvalue(const Matrix& sym) {
  if (sym.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[sym.rows() - 1];
}

}  // namespace

OracleResult grid_oracle(const Matrix& A, const ConeH& cone, double resolution, Backend backend) {
  const Index n = A.cols();
  if (cone.dim() != n) throw InvalidInput("grid_oracle: matrix and cone dimensions differ");
  if (n < 1 || n > 3) throw InvalidInput("grid_oracle: unsupported dimension (need n <= 3)");
  if (!(resolution > 0.0)) throw InvalidInput("grid_oracle: resolution must be positive");

  const Matrix Z = null_space_basis(cone.eq, n);
  const int p = static_cast<int>(Z.cols());
  const Matrix gram = A.transpose() * A;
  const Matrix g_red = Z.transpose() * gram * Z;
  const Matrix c_red = Z.transpose() * cone.ineq;  // p x m

  OracleResult out;
  out.method = OracleMethod::Grid;
  out.resolution = resolution;
  if (p == 0) {
    out.value = kInf;
    return out;
  }

  auto eval = [&](const Vector& w) {
    for (Index j = 0; j < c_red.cols(); ++j)
      if (c_red.col(j).dot(w) > 0.0) return kInf;
    return 0.5 * w.dot(g_red * w);
  };
  const GridBest best = scan_sphere(p, resolution, eval, backend);
  out.points_feasible = best.feasible;
  out.value = best.value;
  if (best.index >= 0) out.x_best = Z * best.point;
  out.error_bound = p == 1 ? 0.0 : largest_eigenvalue(gram) * resolution;
  return out;
}

OracleResult pg_oracle(const Matrix& A, const ConeH& cone, Index restarts, Index max_iter,
                       std::uint64_t seed) {
  const Index n = A.cols();
  if (cone.dim() != n) throw InvalidInput("pg_oracle: matrix and cone dimensions differ");
  if (n > 1000) throw InvalidInput("pg_oracle: dimension above 1000");
  if (restarts < 1) throw InvalidInput("pg_oracle: need at least one restart");

  const Matrix gram = A.transpose() * A;
  const double top = largest_eigenvalue(gram);
  const double eta0 = top > 0.0 ? 1.0 / top : 1.0;
  // Decay over the whole run; a short time constant stalls on small eigengaps.
  const double tau = std::max(100.0, static_cast<double>(max_iter));
  const ConeProjector polar(polar_g(cone), 1e-12);

  std::vector<double> values(restarts, kInf);
  std::vector<Vector> points(restarts);

#ifdef CONICSV_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (Index r = 0; r < restarts; ++r) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Vector x;
    for (int attempt = 0; attempt < 100; ++attempt) {
      x = polar.project_onto_polar(random_unit_vector(n, rng));
      if (x.norm() > 1e-10) break;
    }
    const double norm0 = x.norm();
    if (!(norm0 > 1e-10)) continue;
    x /= norm0;
    double best = 0.5 * x.dot(gram * x);
    Vector best_x = x;
    for (Index t = 0; t < max_iter; ++t) {
      const double eta = eta0 / (1.0 + static_cast<double>(t) / tau);
      Vector y = polar.project_onto_polar(x - eta * (gram * x));
      const double norm = y.norm();
      if (norm <= 1e-14) break;
      y /= norm;
      const double v = 0.5 * y.dot(gram * y);
      const double move = (y - x).norm();
      x = y;
      if (v < best) {
        best = v;
        best_x = x;
      }
      if (move < 1e-13) break;
    }
    values[r] = best;
    points[r] = best_x;
  }

  OracleResult out;
  out.method = OracleMethod::ProjectedGradient;
  out.restarts = restarts;
  out.max_iter = max_iter;
  out.seed = seed;
  out.value = kInf;
  for (Index r = 0; r < restarts; ++r) {
    if (values[r] < out.value) {
      out.value = values[r];
      out.x_best = points[r];
    }
  }
  if (out.x_best.size() == 0) throw InvalidInput("pg_oracle: no start projected to a nonzero point of K");
  return out;
}

double sphere_qp_scan(const Vector& lambdas, const Vector& gammas, double resolution,
                      Backend backend) {
  const Index n = lambdas.size();
  if (gammas.size() != n || n < 1 || n > 3)
    throw InvalidInput("sphere_qp_scan: need matching lambdas/gammas with n <= 3");
  auto eval = [&](const Vector& c) {
    return 0.5 * c.dot(lambdas.cwiseProduct(c)) + gammas.dot(c);
  };
  return scan_sphere(static_cast<int>(n), resolution, eval, backend).value;
}

double sphere_qp_scan_bound(const Vector& lambdas, const Vector& gammas, double resolution) {
  if (lambdas.size() <= 1) return 0.0;
  return (lambdas.cwiseAbs().maxCoeff() + gammas.norm()) * resolution;
}

Vector exhaustive_nnqp(const Matrix& Q, const Vector& q) {
  const Index k = q.size();
  if (k > 16) throw InvalidInput("exhaustive_nnqp: at most 16 variables");
  const double scale = 1.0 + Q.cwiseAbs().maxCoeff() + q.cwiseAbs().maxCoeff();
  Vector best = Vector::Zero(k);
  double best_obj = kInf;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    IndexList support;
    for (Index i = 0; i < k; ++i)
      if (mask & (1u << i)) support.push_back(i);
    const Index s = static_cast<Index>(support.size());
    Vector x = Vector::Zero(k);
    if (s > 0) {
      Matrix Qs(s, s);
      Vector qs(s);
      for (Index a = 0; a < s; ++a) {
        qs[a] = q[support[a]];
        for (Index b = 0; b < s; ++b) Qs(a, b) = Q(support[a], support[b]);
      }
      const Vector xs = Qs.completeOrthogonalDecomposition().solve(-qs);
      if ((Qs * xs + qs).norm() > 1e-9 * scale) continue;
      if (xs.minCoeff() < -1e-12 * scale) continue;
      for (Index a = 0; a < s; ++a) x[support[a]] = std::max(0.0, xs[a]);
    }
    const Vector grad = Q * x + q;
    bool ok = true;
    for (Index i = 0; i < k && ok; ++i)
      if (!(mask & (1u << i)) && grad[i] < -1e-9 * scale) ok = false;
    if (!ok) continue;
    const double obj = 0.5 * x.dot(Q * x) + q.dot(x);
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
  }
  return best;
}

}  // namespace conicsv
