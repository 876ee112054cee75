#pragma once

#include <variant>
#include <vector>

#include "wbary/errors.hpp"

namespace wbary {

/// Discrete measure on the real line: finitely many atoms with positive
/// weights summing to one.  Atoms are sorted ascending on construction (ties
/// keep their weights separate; they are equivalent to a merged atom).
class Empirical1D {
 public:
  Empirical1D(std::vector<double> atoms, std::vector<double> weights);

  int size() const { return static_cast<int>(atoms_.size()); }
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  /// Cumulative weights; the last entry is exactly 1.0.
  const std::vector<double>& cumulative() const { return cum_; }

  /// Generalized inverse CDF: the smallest atom whose cumulative weight
  /// reaches u.  Requires u in (0, 1); throws OutOfRangeError otherwise.
  double quantile(double u) const;

  double mean() const;
  double variance() const;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
  std::vector<double> cum_;
};

/// Measure represented by its quantile function sampled at the m midpoint
/// levels (i + 0.5)/m, i = 0..m-1.  Evaluating the quantile at those same
/// levels returns the stored values bit-for-bit, which makes grid-to-grid
/// operations exactly idempotent.
class QuantileGrid {
 public:
  /// Values must be nondecreasing; throws std::invalid_argument otherwise.
  explicit QuantileGrid(std::vector<double> values);

  int size() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }

  /// Midpoint level of cell i.
  double level(int i) const { return (i + 0.5) / size(); }

  /// Piecewise-constant quantile: cell ceil(u*m) - 1.  Requires u in (0, 1).
  double quantile(double u) const;

  /// The grid viewed as an empirical measure with m equal weights (the last
  /// weight absorbs rounding so they sum to exactly one).
  Empirical1D as_empirical() const;

 private:
  std::vector<double> values_;
};

using Measure1D = std::variant<Empirical1D, QuantileGrid>;

double quantile(const Measure1D& mu, double u);

/// Weighted family of one-dimensional measures; weights validated as in the
/// Gaussian case (positive, summing to one within 1e-12).
struct Problem1D {
  std::vector<Measure1D> measures;
  std::vector<double> weights;

  Problem1D(std::vector<Measure1D> measures_, std::vector<double> weights_);

  int size() const { return static_cast<int>(measures.size()); }
};

/// Exact L2 optimal-transport distance between two discrete measures,
/// integrating the squared quantile difference over the merged breakpoints
/// of both CDFs.  No discretization error.
double w2_1d(const Empirical1D& p, const Empirical1D& q);
double w2_1d(const Measure1D& p, const Measure1D& q);

/// sum_j w_j W2^2(mu, nu_j) for a one-dimensional family.
double v_functional_1d(const Measure1D& mu, const Problem1D& problem);

/// One application of the averaged-optimal-map operator, discretized on the
/// m-point midpoint grid: value_i = sum_j w_j q_j((i + 0.5)/m).  On the real
/// line the pushforward law does not depend on mu (the operator lands on its
/// fixed point in a single application), so mu only fixes the signature; the
/// returned grid is the family's quantile average either way.
QuantileGrid g_operator_1d(const Measure1D& mu, const Problem1D& problem, int m);

/// The one-dimensional barycenter on the m-point midpoint grid: quantile
/// function sum_j w_j q_j at the grid levels.
QuantileGrid barycenter_1d(const Problem1D& problem, int m);

struct MultimarginalResult {
  double value;            // optimal multimarginal transport value
  Empirical1D barycenter;  // induced barycenter (sorted weighted averages)
};

/// Exhaustive multimarginal solver for k measures with n equally weighted
/// atoms each: enumerates all (n!)^(k-1) permutation couplings.  Meant as an
/// independent ground truth for tiny instances; requires k <= 3, n <= 6 and
/// at most 1e6 couplings, throwing TooLargeError beyond that.
MultimarginalResult brute_force_multimarginal(const std::vector<Empirical1D>& measures,
                                              const std::vector<double>& weights);

/// Inverse standard normal CDF (Acklam's rational approximation, absolute
/// error ~1.2e-9).  Requires p in (0, 1).
double normal_quantile(double p);

}  // namespace wbary
