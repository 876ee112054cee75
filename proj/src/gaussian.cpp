#include "wbary/gaussian.hpp"

#include <cmath>
#include <string>

namespace wbary {

namespace {

// Tr((R b R)^(1/2)) for R = a^(1/2), via the spectrum of the congruence.
// The congruence of a PSD pair is PSD up to roundoff, so eigenvalues inside
// the clamp band are flushed to zero exactly as in sqrtm_psd.
double trace_inner_sqrt(const SymMat& a_sqrt, const SymMat& b) {
  const SymMat inner = sandwich(a_sqrt, b);
  EigenDecomp ed = sym_eigen(inner);
  const double clamp = -kPsdClampRel * frob_norm(inner);
  double s = 0.0;
  for (double lam : ed.lambda) {
    if (lam < clamp) {
      throw NotPsdError("trace_inner_sqrt: congruence eigenvalue " + std::to_string(lam) +
                        " below clamp threshold");
    }
    s += std::sqrt(std::max(lam, 0.0));
  }
  return s;
}

double sq_dist(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double clamp_sq(double d2, const char* who) {
  if (d2 < -1e-9) {
    throw Error(std::string(who) + ": squared distance " + std::to_string(d2) +
                " is negative beyond rounding tolerance");
  }
  return std::max(d2, 0.0);
}

bool is_pd(const SymMat& a) {
  EigenDecomp ed = sym_eigen(a);
  const double floor = pd_floor(a);
  for (double lam : ed.lambda) {
    if (lam <= floor) return false;
  }
  return true;
}

}  // namespace

GaussianMeasure::GaussianMeasure(std::vector<double> mean_, SymMat cov_)
    : mean(std::move(mean_)), cov(std::move(cov_)) {
  if (static_cast<int>(mean.size()) != cov.dim()) {
    throw DimMismatchError("GaussianMeasure: mean has length " + std::to_string(mean.size()) +
                           " but covariance is " + std::to_string(cov.dim()) + "-dimensional");
  }
  for (double v : mean) {
    if (!std::isfinite(v)) throw std::invalid_argument("GaussianMeasure: non-finite mean entry");
  }
}

BarycenterProblem::BarycenterProblem(std::vector<GaussianMeasure> measures,
                                     std::vector<double> weights)
    : measures_(std::move(measures)), weights_(std::move(weights)) {
  if (measures_.empty()) throw std::invalid_argument("BarycenterProblem: no measures");
  if (weights_.size() != measures_.size()) {
    throw std::invalid_argument("BarycenterProblem: weight count does not match measure count");
  }
  const int d = measures_[0].dim();
  for (const GaussianMeasure& m : measures_) {
    if (m.dim() != d) throw DimMismatchError("BarycenterProblem: mixed dimensions");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) throw std::invalid_argument("BarycenterProblem: weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("BarycenterProblem: weights sum to " + std::to_string(sum) +
                                ", expected 1");
  }
  bool any_pd = false;
  for (const GaussianMeasure& m : measures_) {
    if (is_pd(m.cov)) {
      any_pd = true;
      break;
    }
  }
  if (!any_pd) {
    throw SingularMatrixError(
        "BarycenterProblem: at least one covariance must be positive definite");
  }
}

BarycenterProblem BarycenterProblem::with_uniform_weights(std::vector<GaussianMeasure> measures) {
  const int k = static_cast<int>(measures.size());
  if (k == 0) throw std::invalid_argument("BarycenterProblem: no measures");
  return BarycenterProblem(std::move(measures), uniform_weights(k));
}

double BarycenterProblem::weighted_trace() const {
  double s = 0.0;
  for (size_t j = 0; j < measures_.size(); ++j) s += weights_[j] * trace(measures_[j].cov);
  return s;
}

double BarycenterProblem::det_root_lower_bound() const {
  const int d = dim();
  double s = 0.0;
  for (size_t j = 0; j < measures_.size(); ++j) {
    const double det = det_via_eigen(measures_[j].cov);
    s += weights_[j] * (det <= 0.0 ? 0.0 : std::pow(det, 0.5 / d));
  }
  return s;
}

std::vector<double> uniform_weights(int k) {
  if (k < 1) throw std::invalid_argument("uniform_weights: k must be positive");
  std::vector<double> w(static_cast<size_t>(k), 1.0 / k);
  double head = 0.0;
  for (int j = 0; j < k - 1; ++j) head += w[static_cast<size_t>(j)];
  w.back() = 1.0 - head;
  return w;
}

double w2_gaussian_squared(const GaussianMeasure& p, const GaussianMeasure& q) {
  if (p.dim() != q.dim()) throw DimMismatchError("w2_gaussian: dimension mismatch");
  const SymMat rp = sqrtm_psd(p.cov);
  const double d2 = sq_dist(p.mean, q.mean) + trace(p.cov) + trace(q.cov) -
                    2.0 * trace_inner_sqrt(rp, q.cov);
  return clamp_sq(d2, "w2_gaussian");
}

double w2_gaussian(const GaussianMeasure& p, const GaussianMeasure& q) {
  return std::sqrt(w2_gaussian_squared(p, q));
}

double gelbrich_lower_bound(const std::vector<double>& mean_p, const SymMat& cov_p,
                            const std::vector<double>& mean_q, const SymMat& cov_q) {
  return w2_gaussian_squared(GaussianMeasure(mean_p, cov_p), GaussianMeasure(mean_q, cov_q));
}

SymMat optimal_map_matrix(const SymMat& cov_p, const SymMat& cov_q) {
  if (cov_p.dim() != cov_q.dim()) throw DimMismatchError("optimal_map_matrix: dimension mismatch");
  EigenDecomp ed = sym_eigen(cov_p);
  const double floor = pd_floor(cov_p);
  std::vector<double> root(ed.lambda.size());
  std::vector<double> inv_root(ed.lambda.size());
  for (size_t k = 0; k < ed.lambda.size(); ++k) {
    if (ed.lambda[k] <= floor) {
      throw SingularMatrixError("optimal_map_matrix: source covariance is not positive definite");
    }
    root[k] = std::sqrt(ed.lambda[k]);
    inv_root[k] = 1.0 / root[k];
  }
  const SymMat r = ed.with_eigenvalues(root);
  const SymMat r_inv = ed.with_eigenvalues(inv_root);
  return sandwich(r_inv, sqrtm_psd(sandwich(r, cov_q)));
}

double v_functional(const SymMat& s, const BarycenterProblem& problem) {
  if (s.dim() != problem.dim()) throw DimMismatchError("v_functional: dimension mismatch");
  const SymMat r = sqrtm_psd(s);
  double acc = trace(s);
  for (int j = 0; j < problem.size(); ++j) {
    const SymMat& cj = problem.measure(j).cov;
    acc += problem.weight(j) * (trace(cj) - 2.0 * trace_inner_sqrt(r, cj));
  }
  return acc;
}

SymMat h_map(const SymMat& s, const BarycenterProblem& problem) {
  if (s.dim() != problem.dim()) throw DimMismatchError("h_map: dimension mismatch");
  EigenDecomp ed = sym_eigen(s);
  const double floor = pd_floor(s);
  std::vector<double> root(ed.lambda.size());
  std::vector<double> inv_root(ed.lambda.size());
  for (size_t k = 0; k < ed.lambda.size(); ++k) {
    if (ed.lambda[k] <= floor) {
      throw SingularMatrixError("h_map: argument is not positive definite");
    }
    root[k] = std::sqrt(ed.lambda[k]);
    inv_root[k] = 1.0 / root[k];
  }
  const SymMat r = ed.with_eigenvalues(root);
  const SymMat r_inv = ed.with_eigenvalues(inv_root);
  SymMat m(s.dim());
  for (int j = 0; j < problem.size(); ++j) {
    m += problem.weight(j) * sqrtm_psd(sandwich(r, problem.measure(j).cov));
  }
  return sandwich(r_inv, m);
}

std::vector<double> barycenter_mean(const BarycenterProblem& problem) {
  std::vector<double> mean(static_cast<size_t>(problem.dim()), 0.0);
  for (int j = 0; j < problem.size(); ++j) {
    const std::vector<double>& mj = problem.measure(j).mean;
    for (size_t i = 0; i < mean.size(); ++i) mean[i] += problem.weight(j) * mj[i];
  }
  return mean;
}

BoundReport check_bounds(const SymMat& sigma0, const BarycenterProblem& problem) {
  if (sigma0.dim() != problem.dim()) throw DimMismatchError("check_bounds: dimension mismatch");
  BoundReport report;
  const int d = problem.dim();
  const double det = det_via_eigen(sigma0);
  report.det_slack =
      (det <= 0.0 ? 0.0 : std::pow(det, 0.5 / d)) - problem.det_root_lower_bound();
  report.trace_slack = problem.weighted_trace() - trace(sigma0);

  report.covariances_equal = true;
  const SymMat& first = problem.measure(0).cov;
  const double tol = 1e-12 * (1.0 + frob_norm(first));
  for (int j = 1; j < problem.size(); ++j) {
    if (frob_norm(problem.measure(j).cov - first) > tol) {
      report.covariances_equal = false;
      break;
    }
  }
  return report;
}

}  // namespace wbary
