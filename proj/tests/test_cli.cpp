#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <json.hpp>
#include <sstream>

#include "cli_runner.hpp"
#include "conicsv/dual_solver.hpp"
#include "conicsv/gridapp.hpp"
#include "conicsv/io.hpp"
#include "conicsv/oracle.hpp"
#include "helpers.hpp"

using namespace conicsv;
using testing::run_cli;
using testing::slurp;
using testing::TempDir;
using json = nlohmann::json;

namespace {

std::string matrix_text(const Matrix& A) {
  std::ostringstream os;
  write_matrix(os, A);
  return os.str();
}

std::string cone_text(const ConeH& K) {
  std::ostringstream os;
  write_cone(os, K);
  return os.str();
}

// Value following `key` in "key value" output lines.
std::string field(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  return "";
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

MeasurementModel demo_model(std::uint64_t seed) {
  SplitMix64 rng(seed);
  MeasurementModel m;
  for (int l = 0; l < 6; ++l) {
    ComplexMatrix H(2, 2);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) H(i, j) = {rng.normal(), rng.normal()};
    m.h_list.push_back(0.5 * (H + H.adjoint()));
  }
  return m;
}

}  // namespace

TEST_CASE("sigma: identity with a '0 0' cone file") {
  TempDir dir;
  const auto r = run_cli("sigma " + dir.file("A.txt", "2 2\n1 0\n0 1\n") + " " + dir.file("K.txt", "0 0\n"));
  CHECK(r.status == 0);
  CHECK(std::stod(field(r.out, "sigma_min")) == doctest::Approx(1.0));
  CHECK(field(r.out, "converged") == "true");
  CHECK(!field(r.out, "gap").empty());
  CHECK(!field(r.out, "iters").empty());
  CHECK(!field(r.out, "wall_time").empty());
}

TEST_CASE("sigma: diag(1,2) on R^2") {
  TempDir dir;
  const auto r = run_cli("sigma " + dir.file("A.txt", "2 2\n1 0\n0 2\n") + " " + dir.file("K.txt", "2 0 0\n"));
  CHECK(r.status == 0);
  CHECK(std::stod(field(r.out, "sigma_min")) == doctest::Approx(1.0));
}

TEST_CASE("sigma: seeded 3x3 instance matches the library bit for bit") {
  SplitMix64 rng(42);
  const Matrix A = gaussian_matrix(3, 3, rng);
  const ConeH K(gaussian_matrix(3, 1, rng), Matrix(3, 0));
  TempDir dir;
  const auto r = run_cli("sigma --json " + dir.file("A.txt", matrix_text(A)) + " " + dir.file("K.txt", cone_text(K)));
  const auto lib = solve(A, K);
  const json j = json::parse(r.out);
  CHECK(r.status == (lib.converged ? 0 : 2));
  CHECK(j["sigma_min"].get<double>() == lib.sigma_min);
  CHECK(j["gap"].get<double>() == lib.gap);
  CHECK(j["iters"].get<Index>() == lib.iters);
  CHECK(j["converged"].get<bool>() == lib.converged);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  std::sort(keys.begin(), keys.end());
  CHECK(keys == std::vector<std::string>{"converged", "d", "gap", "id", "iters", "m", "n", "seed",
                                         "sigma_min", "wall_time_seconds"});
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
}

TEST_CASE("sigma: malformed input names line and column, exits 1") {
  TempDir dir;
  const std::string err = dir.path("err.txt");
  const auto r = run_cli("sigma " + dir.file("A.txt", "2 2\n1 0\n0 y\n") + " " + dir.file("K.txt", "0 0\n"), err);
  CHECK(r.status == 1);
  CHECK(slurp(err).find("A.txt:3:3") != std::string::npos);

  const auto dim = run_cli("sigma " + dir.file("B.txt", "2 2\n1 0\n0 1\n") + " " + dir.file("K3.txt", "3 0 0\n"));
  CHECK(dim.status == 1);
  CHECK(run_cli("sigma " + dir.path("missing.txt") + " " + dir.path("K.txt")).status == 1);
  CHECK(run_cli("sigma").status == 1);
}

TEST_CASE("bench: rejects n = 0 and sizes above the desk-scale cap") {
  TempDir dir;
  const std::string err = dir.path("err.txt");
  CHECK(run_cli("bench --n 0").status == 1);
  const auto r = run_cli("bench --n 2001", err);
  CHECK(r.status == 1);
  CHECK(slurp(err).find("desk-scale cap") != std::string::npos);
}

TEST_CASE("bench: --n 200 --trials 1 records a positive wall time") {
  const auto r = run_cli("bench --n 200 --trials 1");
  const auto rows = lines_of(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == run_record_csv_header());
  const RunRecord rec = parse_csv_row(rows[1], 2);
  CHECK(rec.n == 200);
  CHECK(rec.m == 100);
  CHECK(rec.wall_time_seconds > 0.0);
}

TEST_CASE("bench: --n 50 --trials 5 --seed 1 is byte-reproducible and parses back") {
  const auto a = run_cli("--no-timing bench --n 50 --trials 5 --seed 1");
  const auto b = run_cli("--no-timing bench --n 50 --trials 5 --seed 1");
  CHECK(a.out == b.out);
  const auto rows = lines_of(a.out);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(parse_csv_row(rows[i], int(i + 1)).n == 50);
}

TEST_CASE("bench: --n 50 --trials 5 --seed 1 has every trial converged") {
  const auto r = run_cli("--no-timing bench --n 50 --trials 5 --seed 1");
  const auto rows = lines_of(r.out);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(parse_csv_row(rows[i], int(i + 1)).converged);
  CHECK(r.status == 0);
}

TEST_CASE("polar: orthant gives the nonpositive orthant in both forms") {
  TempDir dir;
  const std::string k = dir.file("K.txt", "2 2 0\n-1 0\n0 -1\n");
  const auto h = run_cli("polar --form h " + k);
  CHECK(h.status == 0);
  std::istringstream hin(h.out);
  const ConeH PH = reduce_equalities(parse_cone(hin));
  const auto g = run_cli("polar --form g " + k);
  std::istringstream gin(g.out);
  const ConeG PG = parse_generators(gin);
  CHECK(PG.gens == -Matrix::Identity(2, 2));
  SplitMix64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const Vector y = gaussian_vector(2, rng);
    const bool nonpos = y.maxCoeff() <= 0.0;
    CHECK(member_h(PH, y, 1e-12) == nonpos);
  }
  const auto both = run_cli("polar " + k);
  CHECK(both.out.find("half-space") != std::string::npos);
  CHECK(both.out.find("generator") != std::string::npos);
}

TEST_CASE("polar: '0 0' cone notes that the polar is {0}") {
  TempDir dir;
  const auto r = run_cli("polar " + dir.file("K.txt", "0 0\n"));
  CHECK(r.status == 0);
  CHECK(r.out.find("polar is {0}") != std::string::npos);
  const auto g = run_cli("polar --form g " + dir.file("K3.txt", "3 0 0\n"));
  CHECK(g.out.find("polar is {0}") != std::string::npos);
  std::istringstream gin(g.out);
  CHECK(parse_generators(gin).size() == 0);
}

TEST_CASE("polar: random cone output re-parses and agrees on membership probes") {
  SplitMix64 rng(7);
  TempDir dir;
  for (int trial = 0; trial < 5; ++trial) {
    const ConeH K(gaussian_matrix(4, 2, rng), gaussian_matrix(4, 1, rng));
    const std::string k = dir.file("K" + std::to_string(trial) + ".txt", cone_text(K));
    std::istringstream hin(run_cli("polar --form h " + k).out);
    std::istringstream gin(run_cli("polar --form g " + k).out);
    const ConeH PH = parse_cone(hin);
    const ConeG PG = parse_generators(gin);
    int disagree = 0;
    for (int i = 0; i < 500; ++i) {
      Vector y = gaussian_vector(4, rng);
      if (i % 2) y = PG.gens * gaussian_vector(PG.size(), rng).cwiseAbs();
      if (member_h(PH, y, 1e-7) != member_g(PG, y, 1e-7)) ++disagree;
    }
    CHECK(disagree <= 1);
  }
}

TEST_CASE("oracle: the three oracle-module examples through files") {
  TempDir dir;
  const auto d12 = run_cli("oracle --resolution 1e-4 " + dir.file("A.txt", "2 2\n1 0\n0 2\n") + " " + dir.file("K.txt", "0 0\n"));
  CHECK(d12.status == 0);
  CHECK(std::stod(field(d12.out, "value")) == doctest::Approx(0.5).epsilon(1e-7));

  const std::string I3 = dir.file("I3.txt", "3 3\n1 0 0\n0 1 0\n0 0 1\n");
  const std::string orth = dir.file("O.txt", "3 3 0\n-1 0 0\n0 -1 0\n0 0 -1\n");
  CHECK(std::stod(field(run_cli("oracle " + I3 + " " + orth).out, "value")) == doctest::Approx(0.5));

  SplitMix64 rng(3);
  const Matrix A = gaussian_matrix(3, 3, rng);
  const ConeH K(gaussian_matrix(3, 1, rng), Matrix(3, 0));
  const auto r = run_cli("oracle --json " + dir.file("R.txt", matrix_text(A)) + " " + dir.file("H.txt", cone_text(K)));
  const json j = json::parse(r.out);
  CHECK(j["value"].get<double>() == grid_oracle(A, K, 1e-3).value);
  CHECK(std::abs(j["value"].get<double>() - solve(A, K).primal_value) <= 2e-3);

  const auto pg = run_cli("oracle --method pg --restarts 5 " + dir.file("R2.txt", matrix_text(A)) + " " + dir.file("H2.txt", cone_text(K)));
  CHECK(pg.status == 0);
  CHECK(field(pg.out, "method") == "projected_gradient");
}

TEST_CASE("oracle: grid on n > 3 exits 1") {
  TempDir dir;
  const auto r = run_cli("oracle " + dir.file("A.txt", matrix_text(Matrix::Identity(4, 4))) + " " + dir.file("K.txt", "0 0\n"));
  CHECK(r.status == 1);
}

TEST_CASE("design: zero selection, full-rank reference, library equivalence") {
  TempDir dir;
  const MeasurementModel m = demo_model(5);
  std::ostringstream ms;
  write_model(ms, m);
  const std::string model = dir.file("model.txt", ms.str());
  const auto real = realify(m);

  std::ostringstream full;
  write_vector(full, to_structured_vector(Matrix::Identity(4, 4), 2));
  const std::string w_full = dir.file("w_full.txt", full.str());
  const auto zero = run_cli("design " + model + " " + w_full + " --eval " + dir.file("d0.txt", "0 0 0 0 0 0\n"));
  CHECK(std::stod(field(zero.out, "objective")) == doctest::Approx(0.0));

  const auto ones = run_cli("design " + model + " " + w_full + " --eval " + dir.file("d1.txt", "1 1 1 1 1 1\n"));
  const double lam = Eigen::SelfAdjointEigenSolver<Matrix>(information_matrix(real, Vector::Ones(6))).eigenvalues()[0];
  CHECK(std::abs(std::stod(field(ones.out, "objective")) - lam) <= 1e-8 * (1.0 + lam));

  Eigen::VectorXcd V(2);
  V << std::complex<double>(1.0, 0.5), std::complex<double>(-0.3, 2.0);
  const Vector w0 = to_structured_vector(realify_matrix(V * V.adjoint()), 2);
  std::ostringstream ws;
  write_vector(ws, w0);
  const std::string w_file = dir.file("w0.txt", ws.str());
  const auto g = run_cli("design --json --greedy --budget 3 " + model + " " + w_file);
  const json j = json::parse(g.out);
  const Vector delta = greedy_design(real, w0, 3);
  const auto lib = evaluate_design(real, delta, w0);
  CHECK(j["objective"].get<double>() == lib.objective);
  const auto jd = j["delta"].get<std::vector<double>>();
  CHECK(Vector(Eigen::Map<const Vector>(jd.data(), 6)) == delta);
  CHECK(g.status == (lib.solve.converged ? 0 : 2));

  CHECK(run_cli("design " + model + " " + w_file).status == 1);
  CHECK(run_cli("design --greedy " + model + " " + w_file).status == 1);
  CHECK(run_cli("design " + model + " " + dir.file("short.txt", "1 2\n") + " --eval " + dir.path("d1.txt")).status == 1);
}
