#include "conicsv/nnqp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace conicsv {

double nnqp_objective(const Matrix& Q, const Vector& q, const Vector& x) {
  return 0.5 * x.dot(Q * x) + q.dot(x);
}

double nnqp_kkt_residual(const Matrix& Q, const Vector& q, const Vector& x) {
  if (x.size() == 0) return 0.0;
  const Vector grad = Q * x + q;
  return (x - (x - grad).cwiseMax(0.0)).cwiseAbs().maxCoeff();
}

NnqpResult solve_nnqp(const Matrix& Q, const Vector& q, const NnqpOptions& opts,
                      const Vector& warm) {
  const bool active = opts.method == NnqpMethod::ActiveSet ||
                      (opts.method == NnqpMethod::Auto && q.size() <= kActiveSetLimit);
  return active ? solve_nnqp_active_set(Q, q, opts, warm) : solve_nnqp_spg(Q, q, opts, warm);
}

NnqpResult solve_nnqp_active_set(const Matrix& Q, const Vector& q, const NnqpOptions& opts,
                                 const Vector& warm) {
  const Index k = q.size();
  if (Q.rows() != k || Q.cols() != k) throw InvalidInput("solve_nnqp: dimension mismatch");
  NnqpResult res;
  if (k == 0) {
    res.x = Vector(0);
    res.converged = true;
    return res;
  }
  const double tol = opts.kkt_tol * (1.0 + q.cwiseAbs().maxCoeff());
  const Index max_outer = opts.max_iter > 0 ? opts.max_iter : 3 * k + 10;
  const double qscale = 1.0 + Q.diagonal().cwiseAbs().maxCoeff();

  std::vector<char> passive(static_cast<std::size_t>(k), 0);
  std::vector<char> tabu(static_cast<std::size_t>(k), 0);
  if (warm.size() == k)
    for (Index i = 0; i < k; ++i) passive[static_cast<std::size_t>(i)] = warm[i] > 0.0;
  Vector x = Vector::Zero(k);
  bool singular = false;

  // Minimizer of the objective restricted to the passive set; false when
  // that subsystem is numerically singular.
  auto passive_solve = [&](IndexList& idx, Vector& z) {
    idx.clear();
    for (Index i = 0; i < k; ++i)
      if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
    const Index p = static_cast<Index>(idx.size());
    Matrix Qp(p, p);
    Vector rhs(p);
    for (Index a = 0; a < p; ++a) {
      rhs[a] = -q[idx[a]];
      for (Index b = 0; b < p; ++b) Qp(a, b) = Q(idx[a], idx[b]);
    }
    Eigen::LDLT<Matrix> ldlt(Qp);
    if (ldlt.info() != Eigen::Success) return false;
    const Vector d = ldlt.vectorD();
    if (p > 0 && d.minCoeff() <= 1e-13 * qscale) return false;
    z = ldlt.solve(rhs);
    return z.allFinite();
  };

  Index outer = 0;
  IndexList idx;
  Vector z;
  bool first = true;
  for (; outer < max_outer; ++outer) {
    Index enter = -1;
    if (!first) {
      const Vector w = -(Q * x + q);
      double best = tol;
      for (Index i = 0; i < k; ++i)
        if (!passive[static_cast<std::size_t>(i)] && !tabu[static_cast<std::size_t>(i)] && w[i] > best) {
          best = w[i];
          enter = i;
        }
      if (enter < 0) break;
      passive[static_cast<std::size_t>(enter)] = 1;
    }
    first = false;

    const Vector x_before = x;
    for (Index inner = 0; inner <= k; ++inner) {
      if (!passive_solve(idx, z)) {
        singular = true;
        break;
      }
      bool interior = true;
      for (Index a = 0; a < static_cast<Index>(idx.size()); ++a)
        if (z[a] <= 0.0) interior = false;
      if (interior) {
        x.setZero();
        for (Index a = 0; a < static_cast<Index>(idx.size()); ++a) x[idx[a]] = z[a];
        break;
      }
      // Step from x toward z until the first passive variable hits zero.
      double alpha = 1.0;
      for (Index a = 0; a < static_cast<Index>(idx.size()); ++a) {
        const double xi = x[idx[a]];
        if (z[a] <= 0.0) alpha = std::min(alpha, xi / (xi - z[a]));
      }
      for (Index a = 0; a < static_cast<Index>(idx.size()); ++a) {
        const Index i = idx[a];
        x[i] += alpha * (z[a] - x[i]);
        if (x[i] <= 1e-15 * (1.0 + std::abs(z[a])) || (z[a] <= 0.0 && x[i] <= 0.0)) {
          x[i] = 0.0;
          passive[static_cast<std::size_t>(i)] = 0;
        }
      }
      // Drop the blocking variable(s) exactly.
      for (Index a = 0; a < static_cast<Index>(idx.size()); ++a) {
        const Index i = idx[a];
        const double xi = x_before[i];
        if (z[a] <= 0.0 && xi / std::max(xi - z[a], 1e-300) <= alpha) {
          x[i] = 0.0;
          passive[static_cast<std::size_t>(i)] = 0;
        }
      }
    }
    if (singular) break;
    // An entering variable dropped right away without progress is barred
    // until the iterate moves, which rules out cycling on roundoff.
    if (x != x_before)
      std::fill(tabu.begin(), tabu.end(), 0);
    else if (enter >= 0 && !passive[static_cast<std::size_t>(enter)])
      tabu[static_cast<std::size_t>(enter)] = 1;
  }

  res.x = x;
  res.iterations = outer;
  res.kkt_residual = nnqp_kkt_residual(Q, q, x);
  res.converged = res.kkt_residual <= tol;
  res.objective = nnqp_objective(Q, q, x);
  if (res.converged) return res;

  NnqpOptions spg = opts;
  spg.max_iter = 0;
  NnqpResult polished = solve_nnqp_spg(Q, q, spg, x);
  polished.iterations += outer;
  if (polished.kkt_residual > res.kkt_residual) {
    res.iterations = polished.iterations;
    return res;
  }
  return polished;
}

NnqpResult solve_nnqp_spg(const Matrix& Q, const Vector& q, const NnqpOptions& opts,
                          const Vector& warm) {
  const Index k = q.size();
  if (Q.rows() != k || Q.cols() != k) throw InvalidInput("solve_nnqp: dimension mismatch");

  NnqpResult res;
  if (k == 0) {
    res.x = Vector(0);
    res.converged = true;
    return res;
  }

  const Index max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * k * std::max<Index>(k, 10);
  const double tol = opts.kkt_tol * (1.0 + q.cwiseAbs().maxCoeff());
  constexpr double kAlphaMin = 1e-30;
  constexpr double kAlphaMax = 1e30;
  constexpr double kSufficient = 1e-4;

  Vector x = (warm.size() == k) ? Vector(warm.cwiseMax(0.0)) : Vector(Vector::Zero(k));
  Vector Qx = Q * x;
  Vector grad = Qx + q;
  double f = 0.5 * x.dot(Qx) + q.dot(x);

  const double diag_max = Q.diagonal().cwiseAbs().maxCoeff();
  double alpha = diag_max > 0.0 ? 1.0 / diag_max : 1.0;
  std::deque<double> history{f};

  Vector best_x = x;
  double best_res = (x - (x - grad).cwiseMax(0.0)).cwiseAbs().maxCoeff();

  Index it = 0;
  for (; it < max_iter; ++it) {
    const double kkt = (x - (x - grad).cwiseMax(0.0)).cwiseAbs().maxCoeff();
    if (kkt < best_res) {
      best_res = kkt;
      best_x = x;
    }
    if (kkt <= tol) {
      best_x = x;
      best_res = kkt;
      break;
    }

    const Vector d = (x - alpha * grad).cwiseMax(0.0) - x;
    const Vector Qd = Q * d;
    const double gd = grad.dot(d);
    const double dQd = d.dot(Qd);
    const double f_ref = *std::max_element(history.begin(), history.end());

    // Backtrack along d; the quadratic lets us evaluate f in closed form.
    double beta = 1.0;
    double f_new = f + beta * gd + 0.5 * beta * beta * dQd;
    while (f_new > f_ref + kSufficient * beta * gd && beta > 1e-20) {
      // Exact minimizer along d when the model is convex, else halve.
      const double beta_star = dQd > 0.0 ? -gd / dQd : 0.5 * beta;
      beta = std::clamp(beta_star, 0.1 * beta, 0.5 * beta);
      f_new = f + beta * gd + 0.5 * beta * beta * dQd;
    }

    x += beta * d;
    Qx += beta * Qd;
    grad = Qx + q;
    f = f_new;
    history.push_back(f);
    if (static_cast<int>(history.size()) > opts.memory) history.pop_front();

    const double ss = beta * beta * d.squaredNorm();
    const double sy = beta * beta * dQd;
    alpha = (sy > 0.0) ? std::clamp(ss / sy, kAlphaMin, kAlphaMax) : kAlphaMax;
    if (!(alpha < kAlphaMax)) alpha = diag_max > 0.0 ? 1.0 / diag_max : 1.0;
  }

  res.x = best_x;
  res.iterations = it;
  res.kkt_residual = best_res;
  res.converged = best_res <= tol;
  res.objective = nnqp_objective(Q, q, best_x);
  return res;
}

}  // namespace conicsv
