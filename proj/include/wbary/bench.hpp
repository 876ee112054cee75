#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wbary/fixpoint.hpp"

namespace wbary {

/// Grid of random covariance problems to time the iteration on.  For every
/// (d, k) cell, `replicates` problems are drawn (k Wishart W_d(I, d)
/// covariances, zero means, uniform weights) and solved with every variant.
/// The problem for replicate r depends only on (seed, d, k, r), never on the
/// variant or the thread layout, so all variants face identical inputs and
/// results are bit-reproducible at any thread count.
struct BenchConfig {
  std::vector<int> dims = {2, 3, 5, 10};
  std::vector<int> ks = {2, 3, 5};
  int replicates = 200;
  uint64_t seed = 0;
  double tol = 1e-10;
  int max_iter = 5000;
  std::vector<Variant> variants = {Variant::Paper, Variant::Ru};
  int threads = 1;
};

/// Aggregate for one (d, k, variant) cell.  Replicates that fail to converge
/// (or throw) are counted in `failures` and excluded from the mean and the
/// sample standard deviation.  If every replicate fails, the moments are NaN.
struct BenchCell {
  int d = 0;
  int k = 0;
  Variant variant = Variant::Paper;
  double mean_iter = 0.0;
  double stdev_iter = 0.0;
  int failures = 0;
};

/// The random problem used by benchmark replicate (seed, d, k, r); exposed
/// so tests and diagnostics can rebuild any cell's inputs exactly.
BarycenterProblem make_wishart_problem(uint64_t seed, int d, int k);

std::vector<BenchCell> run_wishart_benchmark(const BenchConfig& config);

struct LogDecreasePoint {
  int n = 0;
  double log10_delta_v = 0.0;
};

/// (n, log10(V_n - V_{n+1})) read off an iteration trace; the series stops
/// at the first nonpositive decrease (the convergence tail, where the
/// logarithm is no longer meaningful).
std::vector<LogDecreasePoint> log_decrease_from_trace(const IterationTrace& trace);

/// Runs the conjugated-step iteration on the problem and returns its decrease
/// series.  The config must use Variant::Paper (monotone decrease is only
/// guaranteed there); anything else throws std::invalid_argument.
std::vector<LogDecreasePoint> log_decrease_series(const BarycenterProblem& problem,
                                                  const IterationConfig& config = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares on (x, y) pairs; needs at least 3 points.  A
/// constant series fits exactly (r2 = 1 by convention when the total sum of
/// squares vanishes).
LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys);
LinearFit fit_linear(const std::vector<LogDecreasePoint>& series);

/// CSV with header "d,k,variant,mean_iter,stdev_iter,failures,replicates",
/// one row per cell in order, floats at 17 significant digits, LF endings.
std::string bench_csv(const std::vector<BenchCell>& cells, int replicates);

/// CSV with header "n,log10_delta_v" in the same float format.
std::string log_decrease_csv(const std::vector<LogDecreasePoint>& series);

/// Shortest-width 17-significant-digit rendering used by the CSV emitters;
/// two equal doubles always render to identical bytes.
std::string format_double(double v);

}  // namespace wbary
