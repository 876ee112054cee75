#include "wbary/onedim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wbary {

namespace {

void check_weights(const std::vector<double>& weights, const char* who) {
  if (weights.empty()) throw std::invalid_argument(std::string(who) + ": no weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument(std::string(who) + ": weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument(std::string(who) + ": weights sum to " + std::to_string(sum) +
                                ", expected 1");
  }
}

std::vector<double> equal_weights(int n) {
  std::vector<double> w(static_cast<size_t>(n), 1.0 / n);
  double head = 0.0;
  for (int i = 0; i < n - 1; ++i) head += w[static_cast<size_t>(i)];
  w.back() = 1.0 - head;
  return w;
}

void check_level(double u, const char* who) {
  if (!(u > 0.0) || !(u < 1.0)) {
    throw OutOfRangeError(std::string(who) + ": level " + std::to_string(u) +
                          " outside the open unit interval");
  }
}

}  // namespace

Empirical1D::Empirical1D(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.size() != weights.size()) {
    throw std::invalid_argument("Empirical1D: atom and weight counts differ");
  }
  if (atoms.empty()) throw std::invalid_argument("Empirical1D: no atoms");
  for (double a : atoms) {
    if (!std::isfinite(a)) throw std::invalid_argument("Empirical1D: non-finite atom");
  }
  check_weights(weights, "Empirical1D");

  std::vector<int> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return atoms[static_cast<size_t>(i)] < atoms[static_cast<size_t>(j)];
  });
  atoms_.reserve(atoms.size());
  weights_.reserve(atoms.size());
  for (int i : order) {
    atoms_.push_back(atoms[static_cast<size_t>(i)]);
    weights_.push_back(weights[static_cast<size_t>(i)]);
  }
  cum_.resize(atoms_.size());
  double c = 0.0;
  for (size_t i = 0; i < weights_.size(); ++i) {
    c += weights_[i];
    cum_[i] = c;
  }
  // The final cumulative weight is 1 by the sum check above; force the exact
  // value so two measures always share their last breakpoint.
  cum_.back() = 1.0;
}

double Empirical1D::quantile(double u) const {
  check_level(u, "Empirical1D::quantile");
  const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
  const size_t i = static_cast<size_t>(it - cum_.begin());
  return atoms_[std::min(i, atoms_.size() - 1)];
}

double Empirical1D::mean() const {
  double s = 0.0;
  for (size_t i = 0; i < atoms_.size(); ++i) s += weights_[i] * atoms_[i];
  return s;
}

double Empirical1D::variance() const {
  const double m = mean();
  double s = 0.0;
  for (size_t i = 0; i < atoms_.size(); ++i) {
    const double d = atoms_[i] - m;
    s += weights_[i] * d * d;
  }
  return s;
}

QuantileGrid::QuantileGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("QuantileGrid: no values");
  for (size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw std::invalid_argument("QuantileGrid: non-finite value");
    if (i > 0 && values_[i] < values_[i - 1]) {
      throw std::invalid_argument("QuantileGrid: values must be nondecreasing");
    }
  }
}

double QuantileGrid::quantile(double u) const {
  check_level(u, "QuantileGrid::quantile");
  const int m = size();
  int i = static_cast<int>(std::ceil(u * m)) - 1;
  i = std::clamp(i, 0, m - 1);
  return values_[static_cast<size_t>(i)];
}

Empirical1D QuantileGrid::as_empirical() const {
  return Empirical1D(values_, equal_weights(size()));
}

double quantile(const Measure1D& mu, double u) {
  return std::visit([u](const auto& m) { return m.quantile(u); }, mu);
}

Problem1D::Problem1D(std::vector<Measure1D> measures_, std::vector<double> weights_)
    : measures(std::move(measures_)), weights(std::move(weights_)) {
  if (measures.empty()) throw std::invalid_argument("Problem1D: no measures");
  if (measures.size() != weights.size()) {
    throw std::invalid_argument("Problem1D: weight count does not match measure count");
  }
  check_weights(weights, "Problem1D");
}

double w2_1d(const Empirical1D& p, const Empirical1D& q) {
  // Both quantile functions are step functions; the squared distance is the
  // integral of their squared difference, taken exactly by walking the
  // merged breakpoints of the two CDFs.
  const std::vector<double>& cp = p.cumulative();
  const std::vector<double>& cq = q.cumulative();
  size_t i = 0;
  size_t j = 0;
  double u_prev = 0.0;
  double acc = 0.0;
  while (i < cp.size() && j < cq.size()) {
    const double u = std::min(cp[i], cq[j]);
    const double diff = p.atoms()[i] - q.atoms()[j];
    acc += (u - u_prev) * diff * diff;
    u_prev = u;
    if (cp[i] == u) ++i;
    if (j < cq.size() && cq[j] == u) ++j;
  }
  return std::sqrt(acc);
}

double w2_1d(const Measure1D& p, const Measure1D& q) {
  const auto as_emp = [](const Measure1D& m) {
    if (const auto* e = std::get_if<Empirical1D>(&m)) return *e;
    return std::get<QuantileGrid>(m).as_empirical();
  };
  return w2_1d(as_emp(p), as_emp(q));
}

double v_functional_1d(const Measure1D& mu, const Problem1D& problem) {
  double acc = 0.0;
  for (int j = 0; j < problem.size(); ++j) {
    const double d = w2_1d(mu, problem.measures[static_cast<size_t>(j)]);
    acc += problem.weights[static_cast<size_t>(j)] * d * d;
  }
  return acc;
}

QuantileGrid g_operator_1d(const Measure1D& mu, const Problem1D& problem, int m) {
  (void)mu;
  return barycenter_1d(problem, m);
}

QuantileGrid barycenter_1d(const Problem1D& problem, int m) {
  if (m < 1) throw std::invalid_argument("barycenter_1d: grid size must be positive");
  std::vector<double> values(static_cast<size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    const double u = (i + 0.5) / m;
    double s = 0.0;
    for (int j = 0; j < problem.size(); ++j) {
      s += problem.weights[static_cast<size_t>(j)] *
           quantile(problem.measures[static_cast<size_t>(j)], u);
    }
    values[static_cast<size_t>(i)] = s;
  }
  return QuantileGrid(std::move(values));
}

MultimarginalResult brute_force_multimarginal(const std::vector<Empirical1D>& measures,
                                              const std::vector<double>& weights) {
  const int k = static_cast<int>(measures.size());
  if (k < 1) throw std::invalid_argument("brute_force_multimarginal: no measures");
  if (static_cast<int>(weights.size()) != k) {
    throw std::invalid_argument("brute_force_multimarginal: weight count mismatch");
  }
  check_weights(weights, "brute_force_multimarginal");
  if (k > 3) throw TooLargeError("brute_force_multimarginal: at most 3 measures supported");

  const int n = measures[0].size();
  if (n > 6) throw TooLargeError("brute_force_multimarginal: at most 6 atoms per measure");
  for (const Empirical1D& mu : measures) {
    if (mu.size() != n) {
      throw std::invalid_argument("brute_force_multimarginal: measures must share atom count");
    }
    for (double w : mu.weights()) {
      if (std::abs(w - 1.0 / n) > 1e-12) {
        throw std::invalid_argument("brute_force_multimarginal: atoms must be equally weighted");
      }
    }
  }

  std::vector<std::vector<int>> perms;
  {
    std::vector<int> p(static_cast<size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }
  double total = 1.0;
  for (int j = 1; j < k; ++j) total *= static_cast<double>(perms.size());
  if (total > 1e6) {
    throw TooLargeError("brute_force_multimarginal: " + std::to_string(total) +
                        " couplings exceed the 1e6 cap");
  }

  // Odometer over one permutation index per measure past the first (the
  // first measure's assignment can be fixed to the identity by symmetry).
  std::vector<size_t> digit(static_cast<size_t>(std::max(k - 1, 0)), 0);
  std::vector<double> pts(static_cast<size_t>(k));
  std::vector<double> best_bary;
  double best = std::numeric_limits<double>::infinity();
  const double atom_w = 1.0 / n;

  for (;;) {
    double cost = 0.0;
    std::vector<double> bary(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      pts[0] = measures[0].atoms()[static_cast<size_t>(i)];
      for (int j = 1; j < k; ++j) {
        const int src = perms[digit[static_cast<size_t>(j - 1)]][static_cast<size_t>(i)];
        pts[static_cast<size_t>(j)] = measures[static_cast<size_t>(j)].atoms()[static_cast<size_t>(src)];
      }
      double xbar = 0.0;
      for (int j = 0; j < k; ++j) xbar += weights[static_cast<size_t>(j)] * pts[static_cast<size_t>(j)];
      bary[static_cast<size_t>(i)] = xbar;
      double ci = 0.0;
      for (int j = 0; j < k; ++j) {
        const double d = xbar - pts[static_cast<size_t>(j)];
        ci += weights[static_cast<size_t>(j)] * d * d;
      }
      cost += atom_w * ci;
    }
    if (cost < best) {
      best = cost;
      best_bary = bary;
    }

    int pos = static_cast<int>(digit.size()) - 1;
    while (pos >= 0) {
      if (++digit[static_cast<size_t>(pos)] < perms.size()) break;
      digit[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }

  return MultimarginalResult{best, Empirical1D(std::move(best_bary), equal_weights(n))};
}

double normal_quantile(double p) {
  check_level(p, "normal_quantile");
  // Acklam's rational approximation with separate tail and central regimes.
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double dd[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  constexpr double phigh = 1.0 - plow;

  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  }
  if (p > phigh) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace wbary
