// Command-line front end: distances, barycenters, iteration benchmarks and
// self-checks for Gaussian optimal-transport problems described by JSON
// files.
//
// Exit codes: 0 success, 1 self-check failure, 2 invalid input, 3 numerical
// error, 4 iteration did not converge (the result is still printed).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wbary/bench.hpp"
#include "wbary/fixpoint.hpp"
#include "wbary/gaussian.hpp"
#include "wbary/onedim.hpp"
#include "wbary/problem_io.hpp"
#include "wbary/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNotConverged = 4;

double default_tol() {
  const char* env = std::getenv("WBARY_TOL");
  if (env == nullptr || *env == '\0') return 1e-10;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == nullptr || *end != '\0' || !(v > 0.0)) {
    throw wbary::ParseError(std::string("invalid WBARY_TOL value '") + env + "'");
  }
  return v;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw wbary::ParseError("cannot open output file '" + path + "'");
  out << content;
}

wbary::StartMatrix start_from_name(const std::string& name) {
  if (name == "identity") return wbary::StartMatrix::identity();
  if (name == "first") return wbary::StartMatrix::first_covariance();
  throw wbary::ParseError("unknown starting matrix '" + name + "' (expected 'identity' or 'first')");
}

int cmd_distance(const std::string& path) {
  const wbary::ProblemFile pf = wbary::load_problem_file(path);
  if (pf.measures.size() != 2) {
    throw wbary::ParseError("distance requires exactly two measures, got " +
                            std::to_string(pf.measures.size()));
  }
  const double d2 = wbary::w2_gaussian_squared(pf.measures[0], pf.measures[1]);
  const wbary::SymMat map = wbary::optimal_map_matrix(pf.measures[0].cov, pf.measures[1].cov);
  nlohmann::json j;
  j["dim"] = pf.dim;
  j["w2"] = std::sqrt(d2);
  j["w2_squared"] = d2;
  j["map_matrix"] = map.data();
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_barycenter(const std::string& path, const wbary::IterationConfig& config,
                   const std::string& trace_out) {
  const wbary::ProblemFile pf = wbary::load_problem_file(path);
  const wbary::BarycenterProblem problem = pf.to_problem();
  auto [res, trace_log] = wbary::solve(problem, config);
  res.family = pf.family;
  if (!trace_out.empty()) write_file(trace_out, wbary::trace_csv(trace_log));
  std::cout << wbary::result_to_json(res).dump(2) << "\n";
  return res.converged ? kExitOk : kExitNotConverged;
}

int cmd_bench(const wbary::BenchConfig& config, const std::string& out_path) {
  const std::vector<wbary::BenchCell> cells = wbary::run_wishart_benchmark(config);
  const std::string csv = wbary::bench_csv(cells, config.replicates);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(out_path, csv);
    std::cout << "bench: " << cells.size() << " cells, " << config.replicates
              << " replicates each -> " << out_path << "\n";
  }
  return kExitOk;
}

struct RandomSpec {
  int d = 0;
  int k = 0;
  uint64_t seed = 0;
};

RandomSpec parse_random_spec(const std::string& s) {
  RandomSpec spec;
  unsigned long long seed = 0;
  if (std::sscanf(s.c_str(), "d=%d,k=%d,seed=%llu", &spec.d, &spec.k, &seed) != 3 ||
      spec.d < 1 || spec.k < 1) {
    throw wbary::ParseError("invalid --random spec '" + s + "' (expected d=D,k=K,seed=S)");
  }
  spec.seed = seed;
  return spec;
}

int cmd_logdecay(const std::string& path, const std::string& random_spec,
                 const wbary::IterationConfig& config, const std::string& out_path) {
  std::optional<wbary::BarycenterProblem> problem;
  if (!random_spec.empty()) {
    const RandomSpec spec = parse_random_spec(random_spec);
    problem.emplace(wbary::make_wishart_problem(spec.seed, spec.d, spec.k));
  } else {
    problem.emplace(wbary::load_problem_file(path).to_problem());
  }

  auto [res, trace_log] = wbary::solve(*problem, config);
  const std::vector<wbary::LogDecreasePoint> series = wbary::log_decrease_from_trace(trace_log);
  const std::string csv = wbary::log_decrease_csv(series);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(out_path, csv);
  }
  // The human-readable fit summary goes to stdout when the CSV went to a
  // file, and to stderr otherwise so piped CSV output stays clean.
  std::ostream& note = out_path.empty() ? std::cerr : std::cout;
  if (series.empty()) {
    note << "logdecay: converged immediately, no positive decreases to report\n";
  } else if (series.size() >= 3) {
    const wbary::LinearFit fit = wbary::fit_linear(series);
    note << "logdecay: fit slope=" << wbary::format_double(fit.slope)
         << " intercept=" << wbary::format_double(fit.intercept)
         << " r2=" << wbary::format_double(fit.r2) << "\n";
  }
  return res.converged ? kExitOk : kExitNotConverged;
}

// Randomized cross-validation of independent computations of the same
// quantities.  Each case is deterministic in (seed, case index); --perturb
// injects a deliberate error so the failure path itself can be exercised.
int cmd_oracle_check(int cases, uint64_t seed, double perturb) {
  using wbary::RngState;

  int pass_1d = 0;
  int pass_commuting = 0;
  int pass_moment = 0;

  for (int i = 0; i < cases; ++i) {
    // Exhaustive multimarginal search vs quantile-average barycenter.
    {
      RngState rng(wbary::derive_seed(seed, 1, static_cast<uint64_t>(i), 0));
      const int n = 2 + i % 5;
      std::vector<wbary::Empirical1D> measures;
      std::vector<double> eq(static_cast<size_t>(n), 1.0 / n);
      double head = 0.0;
      for (int t = 0; t < n - 1; ++t) head += eq[static_cast<size_t>(t)];
      eq.back() = 1.0 - head;
      for (int j = 0; j < 2; ++j) {
        std::vector<double> atoms(static_cast<size_t>(n));
        for (double& a : atoms) a = rng.next_normal();
        measures.emplace_back(std::move(atoms), eq);
      }
      const std::vector<double> lambda = {0.5, 0.5};
      const wbary::MultimarginalResult oracle =
          wbary::brute_force_multimarginal(measures, lambda);

      std::vector<wbary::Measure1D> ms(measures.begin(), measures.end());
      const wbary::Problem1D problem(ms, lambda);
      std::vector<double> grid = wbary::barycenter_1d(problem, n).values();
      if (perturb != 0.0) grid[0] += perturb;

      bool ok = true;
      for (int t = 0; t < n; ++t) {
        if (std::abs(grid[static_cast<size_t>(t)] -
                     oracle.barycenter.atoms()[static_cast<size_t>(t)]) > 1e-12) {
          ok = false;
        }
      }
      const double v_grid =
          wbary::v_functional_1d(wbary::QuantileGrid(grid), problem);
      if (std::abs(v_grid - oracle.value) > 1e-12) ok = false;
      if (!ok) {
        nlohmann::json j;
        j["check"] = "1d-bruteforce";
        j["case"] = i;
        j["atoms_0"] = measures[0].atoms();
        j["atoms_1"] = measures[1].atoms();
        j["grid"] = grid;
        j["oracle_atoms"] = oracle.barycenter.atoms();
        j["oracle_value"] = oracle.value;
        j["grid_value"] = v_grid;
        std::cout << j.dump(2) << "\n";
        std::cerr << "oracle-check: 1d-bruteforce failed at case " << i << "\n";
        return kExitCheckFailed;
      }
      ++pass_1d;
    }

    // Closed form for commuting covariances vs the general iteration and
    // the fixed-point certificate.
    {
      RngState rng(wbary::derive_seed(seed, 2, static_cast<uint64_t>(i), 0));
      const int d = 2 + i % 2;
      const int k = 2 + i % 3;
      const wbary::EigenDecomp basis = wbary::sym_eigen(wbary::sample_wishart(rng, d));
      std::vector<wbary::GaussianMeasure> measures;
      const std::vector<double> zero(static_cast<size_t>(d), 0.0);
      for (int j = 0; j < k; ++j) {
        std::vector<double> lam(static_cast<size_t>(d));
        for (double& v : lam) v = 0.5 + 2.5 * rng.next_uniform();
        measures.emplace_back(zero, basis.with_eigenvalues(lam));
      }
      const wbary::BarycenterProblem problem =
          wbary::BarycenterProblem::with_uniform_weights(measures);
      wbary::SymMat closed = wbary::barycenter_commuting(problem);
      if (perturb != 0.0) closed.set(0, 0, closed(0, 0) + perturb);

      const double cert =
          wbary::frob_norm(wbary::h_map(closed, problem) - wbary::SymMat::identity(d));
      auto [res, trace_log] = wbary::solve(problem);
      (void)trace_log;
      const double gap = wbary::frob_norm(res.cov - closed);
      const double gap_tol = 1e-6 * (1.0 + wbary::frob_norm(closed));
      if (cert > 1e-7 || gap > gap_tol || !res.converged) {
        nlohmann::json j;
        j["check"] = "commuting-closed-form";
        j["case"] = i;
        j["dim"] = d;
        j["k"] = k;
        j["closed_form"] = closed.data();
        j["iterated"] = res.cov.data();
        j["certificate_residual"] = cert;
        j["gap"] = gap;
        std::cout << j.dump(2) << "\n";
        std::cerr << "oracle-check: commuting-closed-form failed at case " << i << "\n";
        return kExitCheckFailed;
      }
      ++pass_commuting;
    }

    // Moment lower bound vs the exact one-dimensional distance.
    {
      RngState rng(wbary::derive_seed(seed, 3, static_cast<uint64_t>(i), 0));
      std::vector<wbary::Empirical1D> pair;
      for (int j = 0; j < 2; ++j) {
        const int n = 2 + (i + j) % 4;
        std::vector<double> atoms(static_cast<size_t>(n));
        for (double& a : atoms) a = rng.next_normal();
        std::vector<double> w(static_cast<size_t>(n));
        double sum = 0.0;
        for (double& v : w) {
          v = 0.1 + rng.next_uniform();
          sum += v;
        }
        double head = 0.0;
        for (size_t t = 0; t + 1 < w.size(); ++t) {
          w[t] /= sum;
          head += w[t];
        }
        w.back() = 1.0 - head;
        pair.emplace_back(std::move(atoms), std::move(w));
      }
      const double exact = wbary::w2_1d(pair[0], pair[1]);
      double gel = wbary::gelbrich_lower_bound(
          {pair[0].mean()}, wbary::SymMat(1, {pair[0].variance()}), {pair[1].mean()},
          wbary::SymMat(1, {pair[1].variance()}));
      if (perturb != 0.0) gel += perturb;
      if (gel > exact * exact + 1e-10) {
        nlohmann::json j;
        j["check"] = "moment-lower-bound";
        j["case"] = i;
        j["atoms_0"] = pair[0].atoms();
        j["weights_0"] = pair[0].weights();
        j["atoms_1"] = pair[1].atoms();
        j["weights_1"] = pair[1].weights();
        j["lower_bound"] = gel;
        j["exact_squared"] = exact * exact;
        std::cout << j.dump(2) << "\n";
        std::cerr << "oracle-check: moment-lower-bound failed at case " << i << "\n";
        return kExitCheckFailed;
      }
      ++pass_moment;
    }
  }

  std::cout << "oracle-check: 1d-bruteforce " << pass_1d << "/" << cases << ", "
            << "commuting-closed-form " << pass_commuting << "/" << cases << ", "
            << "moment-lower-bound " << pass_moment << "/" << cases << "\n";
  std::cout << "oracle-check: all " << (pass_1d + pass_commuting + pass_moment)
            << " checks passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L2 optimal-transport distances and barycenters of Gaussian families"};
  app.require_subcommand(1);

  std::string dist_path;
  CLI::App* dist = app.add_subcommand("distance", "distance and optimal map between two measures");
  dist->add_option("problem", dist_path, "problem file with exactly two measures")->required();

  std::string bary_path;
  std::string bary_variant = "paper";
  std::string bary_s0 = "identity";
  std::string bary_trace_out;
  double bary_tol = 0.0;
  int bary_max_iter = 5000;
  CLI::App* bary = app.add_subcommand("barycenter", "fixed-point barycenter of a weighted family");
  bary->add_option("problem", bary_path, "problem file")->required();
  bary->add_option("--tol", bary_tol, "stop when the objective decrease falls below this");
  bary->add_option("--max-iter", bary_max_iter, "iteration cap");
  bary->add_option("--variant", bary_variant, "fixed-point step: paper | ru");
  bary->add_option("--s0", bary_s0, "starting matrix: identity | first");
  bary->add_option("--trace-out", bary_trace_out, "write per-iterate diagnostics CSV here");

  std::vector<int> bench_dims = {2, 3, 5, 10};
  std::vector<int> bench_ks = {2, 3, 5};
  int bench_replicates = 200;
  uint64_t bench_seed = 0;
  double bench_tol = 0.0;
  int bench_max_iter = 5000;
  int bench_threads = 1;
  std::vector<std::string> bench_variants = {"paper", "ru"};
  std::string bench_out;
  CLI::App* bench = app.add_subcommand("bench", "iteration counts on random Wishart problems");
  bench->add_option("--dims", bench_dims, "dimensions")->delimiter(',');
  bench->add_option("--ks", bench_ks, "measure counts")->delimiter(',');
  bench->add_option("--replicates", bench_replicates, "problems per cell");
  bench->add_option("--seed", bench_seed, "master seed");
  bench->add_option("--tol", bench_tol, "solver tolerance");
  bench->add_option("--max-iter", bench_max_iter, "iteration cap");
  bench->add_option("--threads", bench_threads, "worker threads (result is thread-count independent)");
  bench->add_option("--variants", bench_variants, "steps to compare: paper, ru")->delimiter(',');
  bench->add_option("--out", bench_out, "write CSV here instead of stdout");

  std::string decay_path;
  std::string decay_random;
  std::string decay_out;
  double decay_tol = 0.0;
  int decay_max_iter = 5000;
  CLI::App* decay = app.add_subcommand("logdecay", "per-step objective decrease, log10 scale");
  decay->add_option("problem", decay_path, "problem file");
  decay->add_option("--random", decay_random, "random problem spec d=D,k=K,seed=S");
  decay->add_option("--tol", decay_tol, "solver tolerance");
  decay->add_option("--max-iter", decay_max_iter, "iteration cap");
  decay->add_option("--out", decay_out, "write CSV here instead of stdout");

  int check_cases = 100;
  uint64_t check_seed = 12345;
  double check_perturb = 0.0;
  CLI::App* check = app.add_subcommand("oracle-check", "cross-validate independent computations");
  check->add_option("--cases", check_cases, "random cases per check family");
  check->add_option("--seed", check_seed, "master seed");
  check->add_option("--perturb", check_perturb, "inject this error to exercise the failure path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    const double env_tol = default_tol();
    if (*dist) return cmd_distance(dist_path);
    if (*bary) {
      wbary::IterationConfig config;
      config.tol = bary->count("--tol") > 0 ? bary_tol : env_tol;
      config.max_iter = bary_max_iter;
      config.variant = wbary::variant_from_name(bary_variant);
      config.s0 = start_from_name(bary_s0);
      return cmd_barycenter(bary_path, config, bary_trace_out);
    }
    if (*bench) {
      wbary::BenchConfig config;
      config.dims = bench_dims;
      config.ks = bench_ks;
      config.replicates = bench_replicates;
      config.seed = bench_seed;
      config.tol = bench->count("--tol") > 0 ? bench_tol : env_tol;
      config.max_iter = bench_max_iter;
      config.threads = bench_threads;
      config.variants.clear();
      for (const std::string& name : bench_variants) {
        config.variants.push_back(wbary::variant_from_name(name));
      }
      return cmd_bench(config, bench_out);
    }
    if (*decay) {
      if (decay_path.empty() == decay_random.empty()) {
        throw wbary::ParseError("logdecay needs exactly one of a problem file or --random");
      }
      wbary::IterationConfig config;
      config.tol = decay->count("--tol") > 0 ? decay_tol : env_tol;
      config.max_iter = decay_max_iter;
      return cmd_logdecay(decay_path, decay_random, config, decay_out);
    }
    if (*check) {
      if (check_cases < 0) throw wbary::ParseError("--cases must be nonnegative");
      return cmd_oracle_check(check_cases, check_seed, check_perturb);
    }
  } catch (const wbary::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const wbary::DimMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const wbary::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitBadInput;
}
