#pragma once

#include <vector>

#include "wbary/symmat.hpp"

namespace wbary {

/// Gaussian (or elliptical) measure given by its first two moments.
struct GaussianMeasure {
  std::vector<double> mean;
  SymMat cov;

  GaussianMeasure(std::vector<double> mean_, SymMat cov_);

  int dim() const { return cov.dim(); }
};

/// A weighted family of Gaussian measures sharing one dimension.  Weights
/// must be positive and sum to one (within 1e-12); at least one covariance
/// must be positive definite, which is what guarantees the barycenter
/// problem has a unique nondegenerate solution.
class BarycenterProblem {
 public:
  BarycenterProblem(std::vector<GaussianMeasure> measures, std::vector<double> weights);

  static BarycenterProblem with_uniform_weights(std::vector<GaussianMeasure> measures);

  int dim() const { return measures_[0].dim(); }
  int size() const { return static_cast<int>(measures_.size()); }
  const GaussianMeasure& measure(int j) const { return measures_[static_cast<size_t>(j)]; }
  double weight(int j) const { return weights_[static_cast<size_t>(j)]; }
  const std::vector<GaussianMeasure>& measures() const { return measures_; }
  const std::vector<double>& weights() const { return weights_; }

  /// sum_j w_j Tr(cov_j); an a-priori upper bound for the barycenter trace.
  double weighted_trace() const;

  /// sum_j w_j det(cov_j)^(1/2d); a lower bound for det(barycenter)^(1/2d).
  double det_root_lower_bound() const;

 private:
  std::vector<GaussianMeasure> measures_;
  std::vector<double> weights_;
};

/// Exactly-positive weight vector (w, ..., w, 1 - (k-1) w) with w = 1/k; the
/// last entry absorbs rounding so the sum is exactly 1.0.
std::vector<double> uniform_weights(int k);

/// Outcome of the sanity bounds on a candidate barycenter covariance.
/// Slacks are "candidate minus bound", so nonnegative means the bound holds.
struct BoundReport {
  double det_slack = 0.0;    // det(S)^(1/2d) - sum_j w_j det(cov_j)^(1/2d)
  double trace_slack = 0.0;  // sum_j w_j Tr(cov_j) - Tr(S)
  bool covariances_equal = false;

  bool ok() const { return det_slack >= -1e-8 && trace_slack >= -1e-8; }
};

/// Squared L2 optimal-transport distance between two Gaussians:
///   ||m_p - m_q||^2 + Tr(C_p) + Tr(C_q) - 2 Tr((C_p^(1/2) C_q C_p^(1/2))^(1/2)).
/// Tiny negative rounding (no lower than -1e-9) is flushed to zero.
double w2_gaussian_squared(const GaussianMeasure& p, const GaussianMeasure& q);

/// L2 optimal-transport distance between two Gaussians.
double w2_gaussian(const GaussianMeasure& p, const GaussianMeasure& q);

/// Squared-distance lower bound for ANY two measures with these moments;
/// equals w2_gaussian_squared when both measures are actually Gaussian.
double gelbrich_lower_bound(const std::vector<double>& mean_p, const SymMat& cov_p,
                            const std::vector<double>& mean_q, const SymMat& cov_q);

/// Matrix A of the optimal map x -> mean_q + A (x - mean_p) pushing
/// N(mean_p, cov_p) onto N(mean_q, cov_q):
///   A = C_p^(-1/2) (C_p^(1/2) C_q C_p^(1/2))^(1/2) C_p^(-1/2).
/// Requires cov_p positive definite.
SymMat optimal_map_matrix(const SymMat& cov_p, const SymMat& cov_q);

/// Objective V(S) = sum_j w_j W2^2(N(0, S), N(0, cov_j)), the function the
/// fixed-point iterations drive down.  S must be positive semidefinite.
double v_functional(const SymMat& s, const BarycenterProblem& problem);

/// H(S) = sum_j w_j S^(-1/2) (S^(1/2) cov_j S^(1/2))^(1/2) S^(-1/2), the
/// weighted mean of optimal maps onto the family.  H(S) = I certifies S as
/// the barycenter covariance.  Requires S positive definite.
SymMat h_map(const SymMat& s, const BarycenterProblem& problem);

/// The barycenter mean is the weighted mean of means regardless of the
/// covariances.
std::vector<double> barycenter_mean(const BarycenterProblem& problem);

/// Checks the determinant and trace bounds for a candidate barycenter
/// covariance and flags the all-covariances-equal case (where the trace
/// bound is tight).
BoundReport check_bounds(const SymMat& sigma0, const BarycenterProblem& problem);

}  // namespace wbary
