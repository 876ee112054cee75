#include "wbary/fixpoint.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wbary {

namespace {

// Everything the iteration needs from one iterate S, computed off a single
// eigendecomposition of S plus one spectral call per input covariance:
//
//   m        = sum_j w_j (S^(1/2) C_j S^(1/2))^(1/2)
//   v        = Tr(S) + sum_j w_j Tr(C_j) - 2 Tr(m)
//   h        = S^(-1/2) m S^(-1/2)
//   residual = ||h - I||_F
//
// and the two candidate successors:
//
//   conjugated step     S^(-1/2) m^2 S^(-1/2)   (Variant::Paper)
//   averaged-root step  m                        (Variant::Ru)
struct Iterate {
  SymMat s;
  SymMat r_inv;  // S^(-1/2)
  SymMat m;
  double v = 0.0;
  double trace_s = 0.0;
  double log_det = 0.0;
  double residual = 0.0;
};

Iterate make_iterate(SymMat s, const BarycenterProblem& problem, const char* who) {
  Iterate it;
  it.s = std::move(s);
  EigenDecomp ed = sym_eigen(it.s);
  const double floor = pd_floor(it.s);
  std::vector<double> root(ed.lambda.size());
  std::vector<double> inv_root(ed.lambda.size());
  it.log_det = 0.0;
  for (size_t k = 0; k < ed.lambda.size(); ++k) {
    if (ed.lambda[k] <= floor) {
      throw SingularMatrixError(std::string(who) + ": iterate lost positive definiteness");
    }
    root[k] = std::sqrt(ed.lambda[k]);
    inv_root[k] = 1.0 / root[k];
    it.log_det += std::log(ed.lambda[k]);
  }
  const SymMat r = ed.with_eigenvalues(root);
  it.r_inv = ed.with_eigenvalues(inv_root);

  const int d = problem.dim();
  it.m = SymMat(d);
  double trace_m = 0.0;
  for (int j = 0; j < problem.size(); ++j) {
    const SymMat term = sqrtm_psd(sandwich(r, problem.measure(j).cov));
    it.m += problem.weight(j) * term;
  }
  trace_m = trace(it.m);
  it.trace_s = trace(it.s);
  it.v = it.trace_s + problem.weighted_trace() - 2.0 * trace_m;

  const SymMat h = sandwich(it.r_inv, it.m);
  it.residual = frob_norm(h - SymMat::identity(d));
  return it;
}

SymMat advance(const Iterate& it, Variant variant) {
  if (variant == Variant::Ru) return it.m;
  return sandwich(it.r_inv, mat_square(it.m));
}

SymMat start_matrix(const BarycenterProblem& problem, const StartMatrix& s0) {
  switch (s0.kind) {
    case StartMatrix::Kind::Identity:
      return SymMat::identity(problem.dim());
    case StartMatrix::Kind::FirstCovariance:
      return problem.measure(0).cov;
    case StartMatrix::Kind::Explicit:
      if (!s0.matrix.has_value()) {
        throw std::invalid_argument("solve: explicit starting matrix not provided");
      }
      if (s0.matrix->dim() != problem.dim()) {
        throw DimMismatchError("solve: starting matrix dimension mismatch");
      }
      return *s0.matrix;
  }
  throw std::invalid_argument("solve: unknown starting matrix kind");
}

StepRecord record_of(int n, const Iterate& it, std::optional<double> delta_v) {
  StepRecord rec;
  rec.n = n;
  rec.v = it.v;
  rec.delta_v = delta_v;
  rec.trace = it.trace_s;
  rec.log_det = it.log_det;
  rec.residual = it.residual;
  return rec;
}

}  // namespace

std::string variant_name(Variant v) { return v == Variant::Paper ? "paper" : "ru"; }

Variant variant_from_name(const std::string& name) {
  if (name == "paper") return Variant::Paper;
  if (name == "ru") return Variant::Ru;
  throw std::invalid_argument("unknown variant '" + name + "' (expected 'paper' or 'ru')");
}

SymMat step_paper(const SymMat& s, const BarycenterProblem& problem) {
  return advance(make_iterate(s, problem, "step_paper"), Variant::Paper);
}

SymMat step_ru(const SymMat& s, const BarycenterProblem& problem) {
  return advance(make_iterate(s, problem, "step_ru"), Variant::Ru);
}

std::pair<BarycenterResult, IterationTrace> solve(const BarycenterProblem& problem,
                                                  const IterationConfig& config) {
  if (!(config.tol > 0.0)) throw std::invalid_argument("solve: tol must be positive");
  if (config.max_iter < 1) throw std::invalid_argument("solve: max_iter must be at least 1");

  IterationTrace trace_log;
  Iterate it = make_iterate(start_matrix(problem, config.s0), problem, "solve");
  trace_log.push_back(record_of(0, it, std::nullopt));

  bool hit_tol = false;
  int n_iter = config.max_iter;
  for (int n = 1; n <= config.max_iter; ++n) {
    const double prev_v = it.v;
    it = make_iterate(advance(it, config.variant), problem, "solve");
    const double dv = prev_v - it.v;
    trace_log.push_back(record_of(n, it, dv));
    if (dv < config.tol) {
      hit_tol = true;
      n_iter = n;
      break;
    }
  }

  BarycenterResult res;
  res.mean = barycenter_mean(problem);
  res.cov = it.s;
  res.n_iter = n_iter;
  res.tol_reached = hit_tol;
  res.final_residual = it.residual;
  res.bound_report = check_bounds(it.s, problem);
  res.converged = hit_tol && it.residual <= kResidualTol && res.bound_report.ok();
  return {std::move(res), std::move(trace_log)};
}

SymMat barycenter_commuting(const BarycenterProblem& problem) {
  const int d = problem.dim();
  for (int i = 0; i < problem.size(); ++i) {
    for (int j = i + 1; j < problem.size(); ++j) {
      const SymMat& a = problem.measure(i).cov;
      const SymMat& b = problem.measure(j).cov;
      const std::vector<double> ab = mat_mul_raw(a, b);
      const std::vector<double> ba = mat_mul_raw(b, a);
      double comm = 0.0;
      for (size_t t = 0; t < ab.size(); ++t) {
        const double diff = ab[t] - ba[t];
        comm += diff * diff;
      }
      const double scale = std::max(1.0, frob_norm(a) * frob_norm(b));
      if (std::sqrt(comm) > 1e-10 * scale) {
        throw NotCommutingError("barycenter_commuting: covariances " + std::to_string(i) +
                                " and " + std::to_string(j) + " do not commute");
      }
    }
  }
  SymMat acc(d);
  for (int j = 0; j < problem.size(); ++j) {
    acc += problem.weight(j) * sqrtm_psd(problem.measure(j).cov);
  }
  return mat_square(acc);
}

BarycenterResult solve_location_scatter(const BarycenterProblem& problem,
                                        const IterationConfig& config) {
  auto [res, trace_log] = solve(problem, config);
  (void)trace_log;
  res.family = "location-scatter";
  return res;
}

std::pair<std::vector<double>, SymMat> ellipsoid_barycenter(
    const std::vector<Ellipsoid>& ellipsoids, const std::vector<double>& weights,
    const IterationConfig& config) {
  std::vector<GaussianMeasure> measures;
  measures.reserve(ellipsoids.size());
  for (const Ellipsoid& e : ellipsoids) measures.emplace_back(e.center, e.shape);
  const BarycenterProblem problem(std::move(measures), weights);
  BarycenterResult res = solve_location_scatter(problem, config);
  return {std::move(res.mean), std::move(res.cov)};
}

}  // namespace wbary
