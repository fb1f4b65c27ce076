#include <doctest.h>

#include "conicsv/oracle.hpp"
#include "conicsv/sphere_qp.hpp"
#include "helpers.hpp"

using namespace conicsv;
using testing::max_abs;

namespace {

SpectralDecomposition spec_of(const Matrix& A) { return decompose_gram(A); }

Matrix sqrt_diag(std::initializer_list<double> lambdas) {
  Vector v(static_cast<Index>(lambdas.size()));
  Index i = 0;
  for (double l : lambdas) v[i++] = std::sqrt(l);
  return v.asDiagonal();
}

// Sphere KKT residual ||G x + u - nu x|| with nu = x'(G x + u).
double sphere_kkt(const Matrix& G, const Vector& u, const Vector& x) {
  const Vector r = G * x + u;
  return (r - x.dot(r) * x).norm();
}

}  // namespace

TEST_CASE("decompose_gram: identity and diagonal") {
  const auto s1 = spec_of(Matrix::Identity(2, 2));
  CHECK(s1.lambdas[0] == doctest::Approx(1.0));
  CHECK(s1.lambdas[1] == doctest::Approx(1.0));
  CHECK(max_abs(s1.phi - Matrix::Identity(2, 2)) < 1e-12);

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 2.0;
  const auto s2 = spec_of(D);
  CHECK(s2.lambdas[0] == doctest::Approx(1.0));
  CHECK(s2.lambdas[1] == doctest::Approx(4.0));
  CHECK(max_abs(s2.phi - Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("decompose_gram: random 5x3 reconstructs the Gram matrix") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = gaussian_matrix(5, 3, rng);
    const Matrix G = A.transpose() * A;
    const auto s = spec_of(A);
    const Matrix R = s.phi * s.lambdas.asDiagonal() * s.phi.transpose();
    CHECK(max_abs(G - R) <= 1e-8 * (1.0 + max_abs(G)));
    CHECK(max_abs(s.phi.transpose() * s.phi - Matrix::Identity(3, 3)) <= 1e-10);
    for (Index i = 0; i + 1 < 3; ++i) CHECK(s.lambdas[i] <= s.lambdas[i + 1]);
    CHECK(s.lambdas[0] >= -s.multiplicity_tol);
    // Sign convention: first nonzero entry of each eigenvector positive.
    for (Index j = 0; j < 3; ++j) {
      Index i = 0;
      while (std::abs(s.phi(i, j)) < 1e-12) ++i;
      CHECK(s.phi(i, j) > 0.0);
    }
  }
}

TEST_CASE("decompose_gram: deterministic and rejects non-finite input") {
  SplitMix64 rng(3);
  const Matrix A = gaussian_matrix(6, 6, rng);
  const auto a = spec_of(A);
  const auto b = spec_of(A);
  CHECK(a.lambdas == b.lambdas);
  CHECK(a.phi == b.phi);
  Matrix bad = A;
  bad(2, 3) = std::nan("");
  CHECK_THROWS_AS(spec_of(bad), InvalidInput);
}

TEST_CASE("secular_root: closed-form cases") {
  Vector l1(1), g1(1);
  l1 << 2.0;
  g1 << 1.0;
  CHECK(secular_root(l1, g1, 1e-8) == doctest::Approx(1.0).epsilon(1e-12));

  Vector l2(2), g2(2);
  l2 << 0.0, 3.0;
  g2 << 1.0, 0.0;
  CHECK(secular_root(l2, g2, 1e-8) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("secular_root: random n=4 against a dense scan of f") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    Vector lambdas(4), gammas(4);
    for (Index i = 0; i < 4; ++i) {
      lambdas[i] = 5.0 * rng.uniform();
      gammas[i] = rng.normal();
    }
    std::sort(lambdas.data(), lambdas.data() + 4);
    const double mu = secular_root(lambdas, gammas, 1e-10);
    CHECK(mu < lambdas[0]);
    CHECK(std::abs(secular_function(lambdas, gammas, mu) - 1.0) <= 1e-10);

    // Oracle: first sign change of f - 1 on a uniform grid.
    const double lo = lambdas[0] - gammas.norm() - 1.0;
    const double hi = lambdas[0];
    const int steps = 200000;
    const double h = (hi - lo) / steps;
    double crossing = std::nan("");
    double prev = secular_function(lambdas, gammas, lo) - 1.0;
    for (int k = 1; k < steps; ++k) {
      const double t = lo + k * h;
      const double cur = secular_function(lambdas, gammas, t) - 1.0;
      if (prev < 0.0 && cur >= 0.0) {
        crossing = t;
        break;
      }
      prev = cur;
    }
    REQUIRE(std::isfinite(crossing));
    CHECK(std::abs(mu - crossing) <= h);
  }
}

TEST_CASE("classify: worked examples") {
  const auto s = spec_of(sqrt_diag({1.0, 2.0}));
  CHECK(classify(s, Vector::Zero(2)).label == QpCase::Degenerate);
  CHECK(classify(s, Vector::Zero(2)).gammas.isZero());

  Vector u(2);
  u << 0.0, 1.0;
  const auto c1 = classify(s, u);
  CHECK(c1.label == QpCase::Degenerate);
  CHECK(c1.gammas[1] == doctest::Approx(1.0));

  u << 0.0, 2.0;
  CHECK(classify(s, u).label == QpCase::Nondegenerate);
}

TEST_CASE("solve_sphere_qp: u = 0 is degenerate with radius 1 and value lambda_1 / 2") {
  SplitMix64 rng(5);
  const Matrix A = gaussian_matrix(4, 4, rng);
  const auto s = spec_of(A);
  const auto sol = solve_sphere_qp(s, Vector::Zero(4));
  CHECK(sol.degenerate);
  CHECK(sol.free_radius == doctest::Approx(1.0));
  CHECK(sol.value == doctest::Approx(0.5 * s.lambdas[0]));
  CHECK(dual_value(s, Vector::Zero(4)) == doctest::Approx(0.5 * s.lambdas[0]));
}

TEST_CASE("solve_sphere_qp: lambda=(2), gamma=(1) has minimizer -1 and value 0") {
  Vector l(1), g(1);
  l << 2.0;
  g << 1.0;
  const auto sol = solve_sphere_qp_gammas(l, g, 1e-8);
  CHECK_FALSE(sol.degenerate);
  CHECK(sol.multiplier == doctest::Approx(1.0));
  CHECK(sol.coeffs[0] == doctest::Approx(-1.0));
  CHECK(sol.value == doctest::Approx(0.0));
  // Two-point enumeration.
  CHECK(std::min(0.5 * 2 + 1, 0.5 * 2 - 1) == doctest::Approx(sol.value));
}

TEST_CASE("solve_sphere_qp: lambda=(1,2), gamma=(0,1) is the degenerate boundary") {
  Vector l(2), g(2);
  l << 1.0, 2.0;
  g << 0.0, 1.0;
  const auto sol = solve_sphere_qp_gammas(l, g, 1e-8);
  CHECK(sol.degenerate);
  CHECK(sol.coeffs[1] == doctest::Approx(-1.0));
  CHECK(sol.free_radius == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sol.value == doctest::Approx(0.0).epsilon(1e-12));
  // Circle scan at 1e-4 rad.
  CHECK(std::abs(sphere_qp_scan(l, g, 1e-4) - sol.value) <= 1e-7);
}

TEST_CASE("dual_value: concavity along a line for diag(1,2)") {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  const auto s = spec_of(A);
  for (double t : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    Vector up(2), um(2);
    up << 0.0, t;
    um << 0.0, -t;
    CHECK(dual_value(s, Vector::Zero(2)) >= 0.5 * (dual_value(s, up) + dual_value(s, um)) - 1e-12);
  }
}

TEST_CASE("dual_value: theta(u) <= L(x, u) for random unit x") {
  SplitMix64 rng(77);
  const Matrix A = gaussian_matrix(6, 4, rng);
  const auto s = spec_of(A);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector u = 3.0 * gaussian_vector(4, rng);
    const double th = dual_value(s, u);
    for (int k = 0; k < 100; ++k) {
      const Vector x = random_unit_vector(4, rng);
      CHECK(th <= 0.5 * (A * x).squaredNorm() + u.dot(x) + 1e-12);
    }
  }
}

TEST_CASE("solution_representative: worked examples") {
  // Nondegenerate: unique c* returned as is.
  Vector l(1), g(1);
  l << 2.0;
  g << 1.0;
  const auto nd = solve_sphere_qp_gammas(l, g, 1e-8);
  Vector hint1(1);
  hint1 << 5.0;
  CHECK(solution_representative(nd, hint1)[0] == doctest::Approx(-1.0));

  Vector l2(2), zero2 = Vector::Zero(2), hint(2);
  l2 << 1.0, 2.0;
  hint << 1.0, 0.0;
  const auto d1 = solve_sphere_qp_gammas(l2, zero2, 1e-8);
  const Vector c1 = solution_representative(d1, hint);
  CHECK(c1[0] == doctest::Approx(1.0));
  CHECK(c1[1] == doctest::Approx(0.0));

  l2 << 1.0, 1.0;
  hint << 3.0, 4.0;
  const auto d2 = solve_sphere_qp_gammas(l2, zero2, 1e-8);
  const Vector c2 = solution_representative(d2, hint);
  CHECK(c2[0] == doctest::Approx(0.6));
  CHECK(c2[1] == doctest::Approx(0.8));

  // Hint orthogonal to E1: lexicographically first free coordinate.
  hint << 0.0, 0.0;
  const Vector c3 = solution_representative(d2, hint);
  CHECK(c3[0] == doctest::Approx(1.0));
}

TEST_CASE("property: optimality, stationarity and multiplier bound on random instances") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 2 + trial % 5;
    const Matrix A = gaussian_matrix(n + 1, n, rng);
    const Matrix G = A.transpose() * A;
    const auto s = spec_of(A);
    // Mix of generic and E1-orthogonal linear terms (the latter hit the degenerate branch).
    Vector u = gaussian_vector(n, rng) * (trial % 3 == 0 ? 0.05 : 2.0);
    if (trial % 4 == 1) u -= s.phi.col(0) * s.phi.col(0).dot(u);
    const auto sol = solve_sphere_qp(s, u);
    const Vector x = s.phi * solution_representative(sol, gaussian_vector(n, rng));
    CHECK(std::abs(x.norm() - 1.0) <= 1e-8);
    if (sol.degenerate)
      CHECK(std::abs(sol.free_radius * sol.free_radius + sol.coeffs.squaredNorm() - 1.0) <= 1e-8);
    else
      CHECK(sol.multiplier <= s.lambdas[0] + s.multiplicity_tol);
    CHECK(sphere_kkt(G, u, x) <= 1e-6 * (1.0 + u.norm()));
    CHECK(std::abs(lagrangian(s, x, u) - sol.value) <= 1e-9 * (1.0 + std::abs(sol.value)));
    for (int k = 0; k < 1000; ++k) {
      const Vector y = random_unit_vector(n, rng);
      CHECK(0.5 * (A * y).squaredNorm() + u.dot(y) >= sol.value - 1e-8 * (1.0 + std::abs(sol.value)));
    }
  }
}

TEST_CASE("property: concavity and supergradient inequality of theta") {
  SplitMix64 rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 3 + trial % 4;
    const Matrix A = gaussian_matrix(n, n, rng);
    const auto s = spec_of(A);
    const Vector u = gaussian_vector(n, rng);
    const Vector v = gaussian_vector(n, rng);
    const double t = rng.uniform();
    CHECK(dual_value(s, t * u + (1 - t) * v) >= t * dual_value(s, u) + (1 - t) * dual_value(s, v) - 1e-10);
    const auto sol = solve_sphere_qp(s, u);
    const Vector xu = s.phi * solution_representative(sol, Vector::Ones(n));
    CHECK(dual_value(s, v) <= dual_value(s, u) + xu.dot(v - u) + 1e-10);
  }
}

TEST_CASE("property: enumeration equivalence for n <= 3") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = 1 + trial % 3;
    Vector l(n), g(n);
    for (Index i = 0; i < n; ++i) {
      l[i] = 4.0 * rng.uniform();
      g[i] = rng.normal();
    }
    std::sort(l.data(), l.data() + n);
    const double res = n == 3 ? 2e-3 : 1e-4;
    const auto sol = solve_sphere_qp_gammas(l, g, default_multiplicity_tol(l));
    const double scan = sphere_qp_scan(l, g, res);
    CHECK(sol.value <= scan + 1e-12);
    CHECK(scan - sol.value <= sphere_qp_scan_bound(l, g, res));
  }
}
