#include "wbary/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

#include "wbary/rng.hpp"

namespace wbary {

namespace {

struct ReplicateOutcome {
  int n_iter = 0;
  bool ok = false;
};

// Aggregates one variant's column of outcomes in replicate order; the order
// is fixed by index, so the aggregate cannot depend on thread scheduling.
BenchCell reduce_cell(int d, int k, Variant variant, const std::vector<ReplicateOutcome>& outcomes) {
  BenchCell cell;
  cell.d = d;
  cell.k = k;
  cell.variant = variant;
  double sum = 0.0;
  int good = 0;
  for (const ReplicateOutcome& o : outcomes) {
    if (o.ok) {
      sum += o.n_iter;
      ++good;
    } else {
      ++cell.failures;
    }
  }
  if (good == 0) {
    cell.mean_iter = std::numeric_limits<double>::quiet_NaN();
    cell.stdev_iter = std::numeric_limits<double>::quiet_NaN();
    return cell;
  }
  cell.mean_iter = sum / good;
  double ss = 0.0;
  for (const ReplicateOutcome& o : outcomes) {
    if (!o.ok) continue;
    const double dlt = o.n_iter - cell.mean_iter;
    ss += dlt * dlt;
  }
  cell.stdev_iter = good > 1 ? std::sqrt(ss / (good - 1)) : 0.0;
  return cell;
}

}  // namespace

BarycenterProblem make_wishart_problem(uint64_t seed, int d, int k) {
  RngState rng(seed);
  std::vector<GaussianMeasure> measures;
  measures.reserve(static_cast<size_t>(k));
  const std::vector<double> zero_mean(static_cast<size_t>(d), 0.0);
  for (int j = 0; j < k; ++j) {
    measures.emplace_back(zero_mean, sample_wishart(rng, d));
  }
  return BarycenterProblem(std::move(measures), uniform_weights(k));
}

std::vector<BenchCell> run_wishart_benchmark(const BenchConfig& config) {
  if (config.replicates < 1) {
    throw std::invalid_argument("run_wishart_benchmark: replicates must be positive");
  }
  if (config.threads < 1) {
    throw std::invalid_argument("run_wishart_benchmark: threads must be positive");
  }
  if (config.variants.empty()) {
    throw std::invalid_argument("run_wishart_benchmark: no variants requested");
  }

  std::vector<BenchCell> cells;
  const int r_total = config.replicates;
  const int n_threads = std::min(config.threads, r_total);

  for (int d : config.dims) {
    for (int k : config.ks) {
      std::vector<std::vector<ReplicateOutcome>> outcomes(
          config.variants.size(), std::vector<ReplicateOutcome>(static_cast<size_t>(r_total)));

      auto worker = [&](int lo, int hi) {
        for (int r = lo; r < hi; ++r) {
          const uint64_t sub =
              derive_seed(config.seed, static_cast<uint64_t>(d), static_cast<uint64_t>(k),
                          static_cast<uint64_t>(r));
          for (size_t vi = 0; vi < config.variants.size(); ++vi) {
            IterationConfig ic;
            ic.tol = config.tol;
            ic.max_iter = config.max_iter;
            ic.variant = config.variants[vi];
            ReplicateOutcome out;
            try {
              const BarycenterProblem problem = make_wishart_problem(sub, d, k);
              auto [res, trace_log] = solve(problem, ic);
              (void)trace_log;
              out.n_iter = res.n_iter;
              // A replicate fails only when the tolerance stop never fires
              // (or the solver errors out); this is the notion of
              // convergence the iteration-count statistics are built on.
              out.ok = res.tol_reached;
            } catch (const Error&) {
              out.ok = false;
            }
            outcomes[vi][static_cast<size_t>(r)] = out;
          }
        }
      };

      if (n_threads == 1) {
        worker(0, r_total);
      } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_threads));
        const int chunk = (r_total + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
          const int lo = t * chunk;
          const int hi = std::min(lo + chunk, r_total);
          if (lo >= hi) break;
          pool.emplace_back(worker, lo, hi);
        }
        for (std::thread& th : pool) th.join();
      }

      for (size_t vi = 0; vi < config.variants.size(); ++vi) {
        cells.push_back(reduce_cell(d, k, config.variants[vi], outcomes[vi]));
      }
    }
  }
  return cells;
}

std::vector<LogDecreasePoint> log_decrease_from_trace(const IterationTrace& trace) {
  std::vector<LogDecreasePoint> series;
  for (size_t i = 0; i + 1 < trace.size(); ++i) {
    const double dv = trace[i].v - trace[i + 1].v;
    if (!(dv > 0.0)) break;
    series.push_back({static_cast<int>(i), std::log10(dv)});
  }
  return series;
}

std::vector<LogDecreasePoint> log_decrease_series(const BarycenterProblem& problem,
                                                  const IterationConfig& config) {
  if (config.variant != Variant::Paper) {
    throw std::invalid_argument("log_decrease_series: requires the conjugated-step variant");
  }
  auto [res, trace_log] = solve(problem, config);
  (void)res;
  return log_decrease_from_trace(trace_log);
}

LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_linear: length mismatch");
  const size_t n = xs.size();
  if (n < 3) throw std::invalid_argument("fit_linear: need at least 3 points");

  double mx = 0.0;
  double my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0;
  double sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_linear: degenerate abscissae");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;

  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double pred = fit.intercept + fit.slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - my) * (ys[i] - my);
  }
  fit.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

LinearFit fit_linear(const std::vector<LogDecreasePoint>& series) {
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(series.size());
  ys.reserve(series.size());
  for (const LogDecreasePoint& p : series) {
    xs.push_back(static_cast<double>(p.n));
    ys.push_back(p.log10_delta_v);
  }
  return fit_linear(xs, ys);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string bench_csv(const std::vector<BenchCell>& cells, int replicates) {
  std::string out = "d,k,variant,mean_iter,stdev_iter,failures,replicates\n";
  for (const BenchCell& c : cells) {
    out += std::to_string(c.d);
    out += ',';
    out += std::to_string(c.k);
    out += ',';
    out += variant_name(c.variant);
    out += ',';
    out += format_double(c.mean_iter);
    out += ',';
    out += format_double(c.stdev_iter);
    out += ',';
    out += std::to_string(c.failures);
    out += ',';
    out += std::to_string(replicates);
    out += '\n';
  }
  return out;
}

std::string log_decrease_csv(const std::vector<LogDecreasePoint>& series) {
  std::string out = "n,log10_delta_v\n";
  for (const LogDecreasePoint& p : series) {
    out += std::to_string(p.n);
    out += ',';
    out += format_double(p.log10_delta_v);
    out += '\n';
  }
  return out;
}

}  // namespace wbary
