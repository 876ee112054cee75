#pragma once

#include <string>
#include <vector>

#include "wbary/fixpoint.hpp"
#include "wbary/gaussian.hpp"

#include <nlohmann/json.hpp>

namespace wbary {

/// A problem description file ill-formed beyond repair (missing fields, bad
/// shapes, asymmetric covariance, ...).  The message names the offending
/// field.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Parsed contents of a problem file.  Two layouts are accepted:
///
///   {"dim": d, "weights": [...], "family": "...",
///    "measures": [{"mean": [...], "cov": [... d*d row-major ...]}, ...]}
///
/// with "weights" (default: uniform) and "family" (default: "gaussian")
/// optional, and the single-measure result layout
///
///   {"dim": d, "mean": [...], "cov": [...]}
///
/// which lets a solver result be fed back in as a one-measure problem.
/// Covariance buffers may deviate from symmetry by at most
/// 1e-9 * max(1, ||cov||_F); they are symmetrized after the check.
struct ProblemFile {
  int dim = 0;
  std::string family = "gaussian";
  std::vector<double> weights;
  std::vector<GaussianMeasure> measures;

  BarycenterProblem to_problem() const;
};

ProblemFile parse_problem_json(const nlohmann::json& j);
ProblemFile load_problem_file(const std::string& path);

nlohmann::json result_to_json(const BarycenterResult& result);

/// CSV of an iteration trace: "n,v,delta_v,trace,log_det,residual" with the
/// delta_v field empty on the starting record.
std::string trace_csv(const IterationTrace& trace);

}  // namespace wbary
