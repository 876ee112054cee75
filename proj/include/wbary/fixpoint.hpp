#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wbary/gaussian.hpp"
#include "wbary/symmat.hpp"

namespace wbary {

/// Which fixed-point step drives the covariance iteration.
///
///   Paper: S <- S^(-1/2) (sum_j w_j (S^(1/2) C_j S^(1/2))^(1/2))^2 S^(-1/2),
///          the conjugated step with guaranteed monotone decrease of V.
///   Ru:    S <- sum_j w_j (S^(1/2) C_j S^(1/2))^(1/2), the plain averaged
///          square root (Ruschendorf-Uckelmann style), kept as a baseline.
enum class Variant { Paper, Ru };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// Starting matrix for the iteration.
struct StartMatrix {
  enum class Kind { Identity, FirstCovariance, Explicit };

  Kind kind = Kind::Identity;
  std::optional<SymMat> matrix;

  static StartMatrix identity() { return {}; }
  static StartMatrix first_covariance() { return {Kind::FirstCovariance, std::nullopt}; }
  static StartMatrix explicit_matrix(SymMat m) { return {Kind::Explicit, std::move(m)}; }
};

struct IterationConfig {
  double tol = 1e-10;  // stop when V(S_n-1) - V(S_n) < tol
  int max_iter = 5000;
  Variant variant = Variant::Paper;
  StartMatrix s0 = StartMatrix::identity();
};

/// Residual level below which a tol-stopped run is reported as converged:
/// ||H(S) - I||_F <= kResidualTol.
inline constexpr double kResidualTol = 1e-6;

/// Per-iterate diagnostics.  Record 0 describes the starting matrix, so its
/// delta_v is empty; delta_v at n >= 1 is V(S_{n-1}) - V(S_n).
struct StepRecord {
  int n = 0;
  double v = 0.0;
  std::optional<double> delta_v;
  double trace = 0.0;
  double log_det = 0.0;
  double residual = 0.0;  // ||H(S_n) - I||_F
};

using IterationTrace = std::vector<StepRecord>;

struct BarycenterResult {
  std::vector<double> mean;
  SymMat cov;
  int n_iter = 0;          // number of step applications performed
  bool tol_reached = false;  // the delta-V stop fired within max_iter
  bool converged = false;    // tol_reached AND residual/bound gates passed
  double final_residual = 0.0;
  BoundReport bound_report;
  std::string family = "gaussian";
};

/// One application of the conjugated step (see Variant::Paper).  The input
/// must be positive definite; the output is exactly symmetric.
SymMat step_paper(const SymMat& s, const BarycenterProblem& problem);

/// One application of the averaged square-root step (see Variant::Ru).
SymMat step_ru(const SymMat& s, const BarycenterProblem& problem);

/// Runs the configured iteration until the decrease of V falls below tol or
/// max_iter steps have been taken.  Returns the result together with the
/// full per-iterate trace (records 0..n_iter).
///
/// `converged` requires all three of: the tol stop fired, the final residual
/// ||H(S) - I||_F is at most kResidualTol, and the determinant/trace bounds
/// hold.  Exceeding max_iter is reported through converged = false, not an
/// exception.
std::pair<BarycenterResult, IterationTrace> solve(const BarycenterProblem& problem,
                                                  const IterationConfig& config = {});

/// Closed form for pairwise commuting covariances:
///   Sigma0 = (sum_j w_j C_j^(1/2))^2.
/// Throws NotCommutingError if any pair fails a scaled commutator check.
SymMat barycenter_commuting(const BarycenterProblem& problem);

/// Barycenter within a location-scatter family: identical numerics to
/// solve(), with the result labelled for the caller.  The fixed-point theory
/// only sees first and second moments, so the same iteration covers every
/// such family.
BarycenterResult solve_location_scatter(const BarycenterProblem& problem,
                                        const IterationConfig& config = {});

/// Centered ellipsoid data: uniform distribution on the solid ellipsoid
/// { x : (x - center)^T shape^(-1) (x - center) <= dim + 2 }, which has
/// covariance exactly `shape`.
struct Ellipsoid {
  std::vector<double> center;
  SymMat shape;
};

/// Barycenter of uniform ellipsoid distributions: returns (center, shape) of
/// the uniform-ellipsoid barycenter, a special case of
/// solve_location_scatter.
std::pair<std::vector<double>, SymMat> ellipsoid_barycenter(
    const std::vector<Ellipsoid>& ellipsoids, const std::vector<double>& weights,
    const IterationConfig& config = {});

}  // namespace wbary
