#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("wbary_cli_test_" + std::to_string(static_cast<long>(::getpid())));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

// Runs the binary with the given argument string, capturing both streams.
RunResult run(const std::string& args, const std::string& env_prefix = "") {
  const fs::path out_file = scratch_dir() / "stdout.txt";
  const fs::path err_file = scratch_dir() / "stderr.txt";
  const std::string cmd = env_prefix + WBARY_CLI_PATH + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

fs::path diag_pair_file() {
  static fs::path p = [] {
    fs::path f = scratch_dir() / "diag_pair.json";
    spit(f, R"({
      "dim": 2,
      "measures": [
        {"mean": [0, 0], "cov": [9, 0, 0, 1]},
        {"mean": [0, 0], "cov": [1, 0, 0, 4]}
      ]
    })");
    return f;
  }();
  return p;
}

fs::path five_matrix_file() {
  static fs::path p = [] {
    fs::path f = scratch_dir() / "five.json";
    spit(f, R"({
      "dim": 2,
      "measures": [
        {"mean": [0, 0], "cov": [9, 0, 0, 1]},
        {"mean": [0, 0], "cov": [1, 0, 0, 4]},
        {"mean": [0, 0], "cov": [2, 1, 1, 2]},
        {"mean": [0, 0], "cov": [2, 1, 1, 1]},
        {"mean": [0, 0], "cov": [0.5, 0.25, 0.25, 1]}
      ]
    })");
    return f;
  }();
  return p;
}

}  // namespace

TEST_CASE("bad invocations exit with code 2") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("distance /nonexistent/problem.json").code == 2);
  CHECK(run("barycenter " + diag_pair_file().string() + " --variant newton").code == 2);
}

TEST_CASE("distance on the diagonal pair") {
  RunResult r = run("distance " + diag_pair_file().string());
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(std::fabs(j["w2_squared"].get<double>() - 5.0) <= 1e-9);
  CHECK(std::fabs(j["w2"].get<double>() - std::sqrt(5.0)) <= 1e-9);
  std::vector<double> map = j["map_matrix"].get<std::vector<double>>();
  REQUIRE(map.size() == 4);
  CHECK(std::fabs(map[0] - 1.0 / 3.0) <= 1e-12);
  CHECK(std::fabs(map[3] - 2.0) <= 1e-12);
}

TEST_CASE("distance of a measure against itself is zero") {
  fs::path f = scratch_dir() / "same.json";
  spit(f, R"({"dim": 1, "measures": [
    {"mean": [1.5], "cov": [2.0]},
    {"mean": [1.5], "cov": [2.0]}
  ]})");
  RunResult r = run("distance " + f.string());
  REQUIRE(r.code == 0);
  CHECK(std::fabs(json::parse(r.out)["w2"].get<double>()) <= 1e-6);
}

TEST_CASE("distance requires exactly two measures") {
  CHECK(run("distance " + five_matrix_file().string()).code == 2);
}

TEST_CASE("missing fields are reported by name with exit 2") {
  fs::path f = scratch_dir() / "nomeasures.json";
  spit(f, R"({"dim": 2})");
  RunResult r = run("barycenter " + f.string());
  CHECK(r.code == 2);
  CHECK(r.err.find("measures") != std::string::npos);

  fs::path g = scratch_dir() / "garbage.json";
  spit(g, "{not json");
  CHECK(run("barycenter " + g.string()).code == 2);
}

TEST_CASE("barycenter of the diagonal pair stops after two steps") {
  RunResult r = run("barycenter " + diag_pair_file().string());
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["n_iter"] == 2);
  CHECK(j["converged"] == true);
  CHECK(j["tol_reached"] == true);
  std::vector<double> cov = j["cov"].get<std::vector<double>>();
  REQUIRE(cov.size() == 4);
  CHECK(std::fabs(cov[0] - 4.0) <= 1e-9);
  CHECK(std::fabs(cov[1]) <= 1e-9);
  CHECK(std::fabs(cov[3] - 2.25) <= 1e-9);
  CHECK(j["family"] == "gaussian");
}

TEST_CASE("the averaged-root variant lands close with more steps") {
  RunResult paper = run("barycenter " + diag_pair_file().string());
  RunResult ru = run("barycenter " + diag_pair_file().string() + " --variant ru");
  REQUIRE(paper.code == 0);
  // The averaged-root step contracts at rate 1/2, so at the default decrease
  // tolerance it stops ~1e-5 short of the fixed point; the residual gate
  // reports that as not converged (exit 4) while still printing the result.
  REQUIRE(ru.code == 4);
  json jp = json::parse(paper.out);
  json jr = json::parse(ru.out);
  CHECK(jr["tol_reached"] == true);
  CHECK(jr["converged"] == false);
  CHECK(jr["n_iter"].get<int>() > jp["n_iter"].get<int>());
  double gap2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double d = jp["cov"][static_cast<size_t>(i)].get<double>() -
                     jr["cov"][static_cast<size_t>(i)].get<double>();
    gap2 += d * d;
  }
  CHECK(std::sqrt(gap2) <= 1e-4);
}

TEST_CASE("a single measure is echoed back") {
  fs::path f = scratch_dir() / "single.json";
  spit(f, R"({"dim": 2, "measures": [
    {"mean": [1.0, -2.0], "cov": [3.0, 0.5, 0.5, 2.0]}
  ]})");
  RunResult r = run("barycenter " + f.string());
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(std::fabs(j["cov"][0].get<double>() - 3.0) <= 1e-9);
  CHECK(std::fabs(j["cov"][1].get<double>() - 0.5) <= 1e-9);
  CHECK(std::fabs(j["cov"][3].get<double>() - 2.0) <= 1e-9);
  CHECK(j["mean"][0] == 1.0);
  CHECK(j["mean"][1] == -2.0);
}

TEST_CASE("a result file round-trips as a problem file") {
  RunResult first = run("barycenter " + diag_pair_file().string());
  REQUIRE(first.code == 0);
  fs::path f = scratch_dir() / "result_as_problem.json";
  spit(f, first.out);

  RunResult echo = run("barycenter " + f.string());
  REQUIRE(echo.code == 0);
  json a = json::parse(first.out);
  json b = json::parse(echo.out);
  for (int i = 0; i < 4; ++i)
    CHECK(std::fabs(a["cov"][static_cast<size_t>(i)].get<double>() -
                    b["cov"][static_cast<size_t>(i)].get<double>()) <= 1e-12);
}

TEST_CASE("no positive definite covariance exits with code 3") {
  fs::path f = scratch_dir() / "singular.json";
  spit(f, R"({"dim": 2, "measures": [
    {"mean": [0, 0], "cov": [1, 0, 0, 0]},
    {"mean": [0, 0], "cov": [0, 0, 0, 1]}
  ]})");
  CHECK(run("barycenter " + f.string()).code == 3);
}

TEST_CASE("iteration starved of steps exits with code 4") {
  RunResult r = run("barycenter " + five_matrix_file().string() + " --max-iter 1");
  REQUIRE(r.code == 4);
  json j = json::parse(r.out);
  CHECK(j["converged"] == false);
  CHECK(j["tol_reached"] == false);
  CHECK(j["n_iter"] == 1);
}

TEST_CASE("starting matrix flag changes the path but not the limit") {
  RunResult id = run("barycenter " + five_matrix_file().string());
  RunResult first = run("barycenter " + five_matrix_file().string() + " --s0 first");
  REQUIRE(id.code == 0);
  REQUIRE(first.code == 0);
  json a = json::parse(id.out);
  json b = json::parse(first.out);
  for (int i = 0; i < 4; ++i)
    CHECK(std::fabs(a["cov"][static_cast<size_t>(i)].get<double>() -
                    b["cov"][static_cast<size_t>(i)].get<double>()) <= 1e-5);
}

TEST_CASE("trace output matches the reported iterations") {
  fs::path trace_file = scratch_dir() / "trace.csv";
  RunResult r = run("barycenter " + diag_pair_file().string() + " --trace-out " +
                    trace_file.string());
  REQUIRE(r.code == 0);
  std::string csv = slurp(trace_file);
  CHECK(csv.rfind("n,v,delta_v,trace,log_det,residual\n", 0) == 0);
  CHECK(csv.find("\n0,2.5,,2,0,") != std::string::npos);
  // header + one row per record 0..n_iter
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 1 + json::parse(r.out)["n_iter"].get<int>() + 1);
}

TEST_CASE("tolerance can come from the environment and the flag wins") {
  const std::string args = "barycenter " + five_matrix_file().string();
  RunResult tight = run(args);
  RunResult loose_flag = run(args + " --tol 1e-2");
  RunResult loose_env = run(args, "env WBARY_TOL=1e-2 ");
  RunResult override_env = run(args + " --tol 1e-10", "env WBARY_TOL=1e-2 ");
  REQUIRE(tight.code == 0);
  REQUIRE(loose_flag.code == 4);  // early stop leaves a visible residual
  REQUIRE(loose_env.code == loose_flag.code);

  const int tight_n = json::parse(tight.out)["n_iter"].get<int>();
  const int flag_n = json::parse(loose_flag.out)["n_iter"].get<int>();
  const int env_n = json::parse(loose_env.out)["n_iter"].get<int>();
  const int override_n = json::parse(override_env.out)["n_iter"].get<int>();
  CHECK(flag_n < tight_n);
  CHECK(env_n == flag_n);
  CHECK(override_n == tight_n);

  CHECK(run(args, "env WBARY_TOL=banana ").code == 2);
}

TEST_CASE("bench emits a stable csv") {
  fs::path a = scratch_dir() / "bench_a.csv";
  fs::path b = scratch_dir() / "bench_b.csv";
  fs::path c = scratch_dir() / "bench_c.csv";
  const std::string common = "bench --dims 2 --ks 2 --replicates 5 --seed 7 ";
  REQUIRE(run(common + "--out " + a.string()).code == 0);
  REQUIRE(run(common + "--out " + b.string()).code == 0);
  REQUIRE(run(common + "--threads 3 --out " + c.string()).code == 0);

  const std::string csv_a = slurp(a);
  CHECK(csv_a == slurp(b));
  CHECK(csv_a == slurp(c));
  CHECK(csv_a.rfind("d,k,variant,mean_iter,stdev_iter,failures,replicates\n", 0) == 0);
  CHECK(csv_a.find("\n2,2,paper,") != std::string::npos);
  CHECK(csv_a.find("\n2,2,ru,") != std::string::npos);

  RunResult to_stdout = run("bench --dims 2 --ks 2 --replicates 5 --seed 7");
  REQUIRE(to_stdout.code == 0);
  CHECK(to_stdout.out == csv_a);

  CHECK(run("bench --dims 2 --ks 2 --replicates 0").code == 2);
  CHECK(run("bench --variants newton").code == 2);
}

TEST_CASE("logdecay emits the decrease series") {
  RunResult r = run("logdecay --random d=3,k=3,seed=17");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("n,log10_delta_v\n", 0) == 0);
  CHECK(r.err.find("fit slope=-") != std::string::npos);

  fs::path out = scratch_dir() / "decay.csv";
  RunResult f = run("logdecay --random d=3,k=3,seed=17 --out " + out.string());
  REQUIRE(f.code == 0);
  CHECK(slurp(out) == r.out);
  // with the CSV in a file the fit summary moves to stdout
  CHECK(f.out.find("fit slope=-") != std::string::npos);
}

TEST_CASE("logdecay on an already-solved problem says so") {
  fs::path f = scratch_dir() / "equal.json";
  spit(f, R"({"dim": 2, "measures": [
    {"mean": [0, 0], "cov": [1, 0, 0, 1]},
    {"mean": [0, 0], "cov": [1, 0, 0, 1]}
  ]})");
  // the default start is already the solution: nothing to decrease
  RunResult r = run("logdecay " + f.string());
  REQUIRE(r.code == 0);
  CHECK(r.out == "n,log10_delta_v\n");
  CHECK(r.err.find("converged immediately") != std::string::npos);
}

TEST_CASE("logdecay wants exactly one input source") {
  CHECK(run("logdecay").code == 2);
  CHECK(run("logdecay " + diag_pair_file().string() + " --random d=2,k=2,seed=1").code == 2);
  CHECK(run("logdecay --random d=0,k=2,seed=1").code == 2);
  CHECK(run("logdecay --random bogus").code == 2);
}

TEST_CASE("oracle checks pass clean and catch an injected error") {
  RunResult r = run("oracle-check --cases 10 --seed 5");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("all 30 checks passed") != std::string::npos);

  RunResult zero = run("oracle-check --cases 0");
  CHECK(zero.code == 0);

  RunResult bad = run("oracle-check --cases 5 --seed 5 --perturb 1e-3");
  CHECK(bad.code == 1);
  CHECK(bad.out.find("\"check\"") != std::string::npos);
  CHECK(!bad.err.empty());
}
