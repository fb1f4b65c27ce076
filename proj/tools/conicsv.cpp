// conicsv command-line frontend.
//
//   conicsv sigma  A.txt K.txt [--eps 1e-4] [--max-iter N] [--json]
//   conicsv bench  --n 500,1000 [--m 100] [--trials 5] [--seed 1] [--out runs.csv]
//   conicsv polar  K.txt [--form h|g|both]
//   conicsv oracle A.txt K.txt [--method grid|pg] [--resolution 1e-3] [--restarts 20]
//   conicsv design model.txt w0.txt (--greedy --budget k | --eval delta.txt)
//
// Exit status: 0 success (certified), 2 finished but uncertified, 1 bad input.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <numeric>
#include <sstream>

#include "conicsv/cones.hpp"
#include "conicsv/dual_solver.hpp"
#include "conicsv/gridapp.hpp"
#include "conicsv/instances.hpp"
#include "conicsv/io.hpp"
#include "conicsv/oracle.hpp"

#ifdef CONICSV_HAVE_OPENMP
#include <omp.h>
#endif

using namespace conicsv;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitUncertified = 2;

struct Common {
  bool no_timing = false;
  int threads = 0;
};

std::string vector_text(const Vector& v) {
  std::ostringstream os;
  write_vector(os, v);
  std::string s = os.str();
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// ---- sigma ----------------------------------------------------------------

struct SigmaArgs {
  std::string matrix_file, cone_file;
  double eps = 1e-4;
  Index max_iter = 5000;
  bool json = false;
};

int run_sigma(const SigmaArgs& a, const Common& c) {
  const Matrix A = read_matrix_file(a.matrix_file);
  const ConeH K = read_cone_file(a.cone_file, A.cols());
  SolveOptions opts;
  opts.eps = a.eps;
  opts.max_iter = a.max_iter;
  const ConicSvResult r = solve(A, K, opts);

  RunRecord rec;
  rec.id = a.matrix_file;
  rec.n = A.cols();
  rec.d = A.rows();
  rec.m = K.num_ineq();
  rec.sigma_min = r.sigma_min;
  rec.gap = r.gap;
  rec.iters = r.iters;
  rec.converged = r.converged;
  rec.wall_time_seconds = c.no_timing ? 0.0 : r.wall_time;
  if (a.json) {
    json j;
    j["id"] = rec.id;
    j["n"] = rec.n;
    j["d"] = rec.d;
    j["m"] = rec.m;
    j["seed"] = rec.seed;
    j["sigma_min"] = rec.sigma_min;
    j["gap"] = rec.gap;
    j["iters"] = rec.iters;
    j["converged"] = rec.converged;
    j["wall_time_seconds"] = rec.wall_time_seconds;
    std::cout << j.dump() << '\n';
  } else {
    std::cout << "sigma_min " << format_real(rec.sigma_min) << '\n'
              << "gap " << format_real(rec.gap) << '\n'
              << "iters " << rec.iters << '\n'
              << "converged " << (rec.converged ? "true" : "false") << '\n'
              << "wall_time " << format_real(rec.wall_time_seconds) << '\n';
  }
  return r.converged ? kExitOk : kExitUncertified;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  std::vector<Index> sizes;
  Index m = 100;
  Index trials = 5;
  std::uint64_t seed = 1;
  std::string out;
  Index cap = 2000;
  double eps = 1e-4;
  Index max_iter = 5000;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

int run_bench(const BenchArgs& a, const Common& c) {
  if (a.sizes.empty()) throw InvalidInput("bench: --n needs at least one size");
  if (a.trials < 1) throw InvalidInput("bench: --trials must be at least 1");
  for (Index n : a.sizes) {
    if (n < 1) throw InvalidInput("bench: sizes must be positive (got " + std::to_string(n) + ")");
    if (n > a.cap)
      throw InvalidInput("bench: n = " + std::to_string(n) + " exceeds the desk-scale cap of " +
                         std::to_string(a.cap) + " (raise it with --cap)");
  }

  struct Job {
    Index n, trial;
  };
  std::vector<Job> jobs;
  for (Index n : a.sizes)
    for (Index t = 0; t < a.trials; ++t) jobs.push_back({n, t});
  std::vector<RunRecord> rows(jobs.size());

  SolveOptions opts;
  opts.eps = a.eps;
  opts.max_iter = a.max_iter;

  const auto count = static_cast<long>(jobs.size());
#ifdef CONICSV_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long k = 0; k < count; ++k) {
    const Job& job = jobs[static_cast<std::size_t>(k)];
    const std::uint64_t seed = bench_seed(a.seed, job.n, job.trial);
    const Instance inst = gaussian_inequality_instance(job.n, job.n, a.m, seed);
    RunRecord& rec = rows[static_cast<std::size_t>(k)];
    ConicSvResult r;
    try {
      r = solve(inst.a, inst.cone, opts);
    } catch (const InvalidInput&) {
      // Sampled cone is {0}: no unit vector, sigma_min undefined.
      r.sigma_min = std::numeric_limits<double>::quiet_NaN();
      r.gap = std::numeric_limits<double>::quiet_NaN();
    }
    rec.id = "n" + std::to_string(job.n) + "_t" + std::to_string(job.trial);
    rec.n = job.n;
    rec.d = job.n;
    rec.m = a.m;
    rec.seed = seed;
    rec.sigma_min = r.sigma_min;
    rec.gap = r.gap;
    rec.iters = r.iters;
    rec.converged = r.converged;
    rec.wall_time_seconds = c.no_timing ? 0.0 : r.wall_time;
  }

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw InvalidInput("bench: cannot write '" + a.out + "'");
  }
  std::ostream& csv = a.out.empty() ? std::cout : file;
  std::ostream& summary = a.out.empty() ? std::cerr : std::cout;

  csv << run_record_csv_header() << '\n';
  for (const RunRecord& r : rows) csv << to_csv_row(r) << '\n';

  bool all_converged = true;
  for (Index n : a.sizes) {
    std::vector<double> times;
    Index ok = 0;
    for (const RunRecord& r : rows)
      if (r.n == n) {
        times.push_back(r.wall_time_seconds);
        ok += r.converged ? 1 : 0;
      }
    all_converged = all_converged && ok == static_cast<Index>(times.size());
    const double mean = std::accumulate(times.begin(), times.end(), 0.0) / times.size();
    summary << "summary n=" << n << " trials=" << times.size() << " converged=" << ok
            << " mean=" << format_real(mean) << " median=" << format_real(median(times))
            << " min=" << format_real(*std::min_element(times.begin(), times.end()))
            << " max=" << format_real(*std::max_element(times.begin(), times.end())) << '\n';
  }
  return all_converged ? kExitOk : kExitUncertified;
}

// ---- polar ----------------------------------------------------------------

struct PolarArgs {
  std::string cone_file;
  std::string form = "both";
  Index dim = -1;
};

int run_polar(const PolarArgs& a) {
  // "0 0" without a dimension: R^n for an unspecified n.
  if (a.dim < 0) {
    std::ifstream in(a.cone_file);
    if (!in) throw InvalidInput("cannot open '" + a.cone_file + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::istringstream words(text);
    std::vector<std::string> tokens;
    for (std::string w; words >> w;) tokens.push_back(w);
    if (tokens.size() == 2 && tokens[0] == "0" && tokens[1] == "0") {
      std::cout << "# note: polar is {0}\n";
      return kExitOk;
    }
  }
  const ConeH K = read_cone_file(a.cone_file, a.dim);
  const bool h = a.form == "h" || a.form == "both";
  const bool g = a.form == "g" || a.form == "both";
  if (h) {
    if (a.form == "both") std::cout << "# polar, half-space form (n m r)\n";
    write_cone(std::cout, reduce_equalities(polar_h(K)));
  }
  if (g) {
    const ConeG P = polar_g(K);
    if (a.form == "both") std::cout << "# polar, generator form (n k)\n";
    write_generators(std::cout, P);
    if (P.size() == 0) std::cout << "# note: polar is {0}\n";
  }
  return kExitOk;
}

// ---- oracle ---------------------------------------------------------------

struct OracleArgs {
  std::string matrix_file, cone_file;
  std::string method = "grid";
  double resolution = 1e-3;
  Index restarts = 20;
  Index max_iter = 2000;
  std::uint64_t seed = 1;
  bool json = false;
};

int run_oracle(const OracleArgs& a) {
  const Matrix A = read_matrix_file(a.matrix_file);
  const ConeH K = read_cone_file(a.cone_file, A.cols());
  OracleResult r;
  if (a.method == "grid") {
    if (A.cols() > 3)
      throw InvalidInput("oracle: grid method supports n <= 3 (n = " + std::to_string(A.cols()) + ")");
    r = grid_oracle(A, K, a.resolution);
  } else {
    r = pg_oracle(A, K, a.restarts, a.max_iter, a.seed);
  }
  if (a.json) {
    json j;
    j["method"] = to_string(r.method);
    j["value"] = r.value;
    j["x_best"] = vector_json(r.x_best);
    j["resolution"] = r.resolution;
    j["restarts"] = r.restarts;
    j["max_iter"] = r.max_iter;
    j["seed"] = r.seed;
    j["error_bound"] = r.error_bound;
    j["points_feasible"] = r.points_feasible;
    std::cout << j.dump() << '\n';
    return kExitOk;
  }
  std::cout << "method " << to_string(r.method) << '\n'
            << "value " << format_real(r.value) << '\n'
            << "x_best " << vector_text(r.x_best) << '\n';
  if (r.method == OracleMethod::Grid)
    std::cout << "resolution " << format_real(r.resolution) << '\n'
              << "error_bound " << format_real(r.error_bound) << '\n'
              << "points_feasible " << r.points_feasible << '\n';
  else
    std::cout << "restarts " << r.restarts << '\n'
              << "max_iter " << r.max_iter << '\n'
              << "seed " << r.seed << '\n';
  return kExitOk;
}

// ---- design ---------------------------------------------------------------

struct DesignArgs {
  std::string model_file, w0_file, delta_file;
  Index budget = 0;
  bool greedy = false;
  bool json = false;
};

int run_design(const DesignArgs& a, const Common& c) {
  const RealifiedModel model = realify(read_model_file(a.model_file));
  const Vector w0 = read_vector_file(a.w0_file);
  if (w0.size() != model.vec_dim)
    throw InvalidInput("design: w0 has " + std::to_string(w0.size()) + " entries, expected N^2 = " +
                       std::to_string(model.vec_dim));
  Vector delta;
  if (a.greedy) {
    if (a.budget < 1) throw InvalidInput("design: --greedy needs --budget >= 1");
    delta = greedy_design(model, w0, a.budget);
  } else {
    delta = read_vector_file(a.delta_file);
    if (delta.size() != model.h.cols())
      throw InvalidInput("design: delta has " + std::to_string(delta.size()) + " entries, expected L = " +
                         std::to_string(model.h.cols()));
  }
  const DesignEvaluation ev = evaluate_design(model, delta, w0);
  const double wall = c.no_timing ? 0.0 : ev.solve.wall_time;
  if (a.json) {
    json j;
    j["objective"] = ev.objective;
    j["delta"] = vector_json(delta);
    j["converged"] = ev.solve.converged;
    j["gap"] = ev.solve.gap;
    j["wall_time_seconds"] = wall;
    std::cout << j.dump() << '\n';
  } else {
    std::cout << "objective " << format_real(ev.objective) << '\n'
              << "delta " << vector_text(delta) << '\n'
              << "converged " << (ev.solve.converged ? "true" : "false") << '\n'
              << "gap " << format_real(ev.solve.gap) << '\n'
              << "wall_time " << format_real(wall) << '\n';
  }
  return ev.solve.converged ? kExitOk : kExitUncertified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smallest conic singular values over polyhedral cones"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_flag("--no-timing", common.no_timing, "Report wall times as 0 (byte-stable output)");
  app.add_option("--threads", common.threads, "OpenMP thread count (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);

  SigmaArgs sigma;
  auto* cmd_sigma = app.add_subcommand("sigma", "Solve one instance from files");
  cmd_sigma->add_option("matrix_file", sigma.matrix_file)->required();
  cmd_sigma->add_option("cone_file", sigma.cone_file)->required();
  cmd_sigma->add_option("--eps", sigma.eps, "Step-norm stopping tolerance")->capture_default_str();
  cmd_sigma->add_option("--max-iter", sigma.max_iter)->capture_default_str();
  cmd_sigma->add_flag("--json", sigma.json, "Single-line JSON output");

  BenchArgs bench;
  auto* cmd_bench = app.add_subcommand("bench", "Random Gaussian-inequality benchmark");
  cmd_bench->add_option("--n", bench.sizes, "Comma-separated sizes")->delimiter(',')->required();
  cmd_bench->add_option("--m", bench.m, "Inequalities per instance")->capture_default_str();
  cmd_bench->add_option("--trials", bench.trials)->capture_default_str();
  cmd_bench->add_option("--seed", bench.seed)->capture_default_str();
  cmd_bench->add_option("--out", bench.out, "CSV file (default: stdout)");
  cmd_bench->add_option("--cap", bench.cap, "Desk-scale size cap")->capture_default_str();
  cmd_bench->add_option("--eps", bench.eps)->capture_default_str();
  cmd_bench->add_option("--max-iter", bench.max_iter)->capture_default_str();

  PolarArgs polar;
  auto* cmd_polar = app.add_subcommand("polar", "Polar cone in half-space and generator form");
  cmd_polar->add_option("cone_file", polar.cone_file)->required();
  cmd_polar->add_option("--form", polar.form)->check(CLI::IsMember({"h", "g", "both"}))->capture_default_str();
  cmd_polar->add_option("--dim", polar.dim, "Dimension for a short 'm r' header");

  OracleArgs oracle;
  auto* cmd_oracle = app.add_subcommand("oracle", "Reference solvers");
  cmd_oracle->add_option("matrix_file", oracle.matrix_file)->required();
  cmd_oracle->add_option("cone_file", oracle.cone_file)->required();
  cmd_oracle->add_option("--method", oracle.method)->check(CLI::IsMember({"grid", "pg"}))->capture_default_str();
  cmd_oracle->add_option("--resolution", oracle.resolution, "Grid step in radians")->capture_default_str();
  cmd_oracle->add_option("--restarts", oracle.restarts)->capture_default_str();
  cmd_oracle->add_option("--max-iter", oracle.max_iter)->capture_default_str();
  cmd_oracle->add_option("--seed", oracle.seed)->capture_default_str();
  cmd_oracle->add_flag("--json", oracle.json);

  DesignArgs design;
  auto* cmd_design = app.add_subcommand("design", "Sensor-selection design objective");
  cmd_design->add_option("model_file", design.model_file)->required();
  cmd_design->add_option("w0_file", design.w0_file)->required();
  cmd_design->add_option("--budget", design.budget);
  auto* greedy = cmd_design->add_flag("--greedy", design.greedy, "Forward greedy selection");
  auto* eval = cmd_design->add_option("--eval", design.delta_file, "Evaluate the given delta file");
  greedy->excludes(eval);
  cmd_design->add_flag("--json", design.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

#ifdef CONICSV_HAVE_OPENMP
  if (common.threads > 0) omp_set_num_threads(common.threads);
#endif

  try {
    if (*cmd_sigma) return run_sigma(sigma, common);
    if (*cmd_bench) return run_bench(bench, common);
    if (*cmd_polar) return run_polar(polar);
    if (*cmd_oracle) return run_oracle(oracle);
    if (*cmd_design) {
      if (!design.greedy && design.delta_file.empty())
        throw InvalidInput("design: pass --greedy or --eval delta_file");
      return run_design(design, common);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
