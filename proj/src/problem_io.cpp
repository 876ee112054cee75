#include "wbary/problem_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "wbary/bench.hpp"

namespace wbary {

namespace {

const nlohmann::json& require_field(const nlohmann::json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end()) {
    throw ParseError(std::string("missing field '") + field + "'");
  }
  return *it;
}

std::vector<double> number_array(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError("field '" + field + "' must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError("field '" + field + "' must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

SymMat parse_cov(const nlohmann::json& j, int dim, const std::string& field) {
  std::vector<double> buf = number_array(j, field);
  if (buf.size() != static_cast<size_t>(dim) * static_cast<size_t>(dim)) {
    throw ParseError("field '" + field + "' must hold " + std::to_string(dim * dim) +
                     " row-major entries");
  }
  double max_asym = 0.0;
  double frob = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j2 = 0; j2 < dim; ++j2) {
      const double v = buf[static_cast<size_t>(i) * dim + j2];
      frob += v * v;
      const double w = buf[static_cast<size_t>(j2) * dim + i];
      max_asym = std::max(max_asym, std::abs(v - w));
    }
  }
  if (max_asym > 1e-9 * std::max(1.0, std::sqrt(frob))) {
    throw ParseError("field '" + field + "' is not symmetric within tolerance");
  }
  try {
    return SymMat(dim, std::move(buf));
  } catch (const std::invalid_argument& e) {
    throw ParseError("field '" + field + "': " + e.what());
  }
}

GaussianMeasure parse_measure(const nlohmann::json& j, int dim, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + " must be an object");
  std::vector<double> mean = number_array(require_field(j, "mean"), where + ".mean");
  if (mean.size() != static_cast<size_t>(dim)) {
    throw ParseError(where + ".mean must hold " + std::to_string(dim) + " entries");
  }
  SymMat cov = parse_cov(require_field(j, "cov"), dim, where + ".cov");
  return GaussianMeasure(std::move(mean), std::move(cov));
}

}  // namespace

BarycenterProblem ProblemFile::to_problem() const {
  try {
    return BarycenterProblem(measures, weights);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

ProblemFile parse_problem_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("problem file must hold a JSON object");
  ProblemFile pf;
  const auto& dim_field = require_field(j, "dim");
  if (!dim_field.is_number_integer() || dim_field.get<int>() < 1) {
    throw ParseError("field 'dim' must be a positive integer");
  }
  pf.dim = dim_field.get<int>();

  if (j.contains("family")) {
    const auto& fam = j.at("family");
    if (!fam.is_string()) throw ParseError("field 'family' must be a string");
    pf.family = fam.get<std::string>();
    if (pf.family != "gaussian" && pf.family != "location-scatter" && pf.family != "ellipsoid") {
      throw ParseError("field 'family' must be one of gaussian, location-scatter, ellipsoid");
    }
  }

  if (j.contains("measures")) {
    const auto& arr = j.at("measures");
    if (!arr.is_array() || arr.empty()) {
      throw ParseError("field 'measures' must be a non-empty array");
    }
    for (size_t i = 0; i < arr.size(); ++i) {
      pf.measures.push_back(
          parse_measure(arr[i], pf.dim, "measures[" + std::to_string(i) + "]"));
    }
  } else if (j.contains("mean") && j.contains("cov")) {
    pf.measures.push_back(parse_measure(j, pf.dim, "measure"));
  } else {
    throw ParseError("missing field 'measures'");
  }

  if (j.contains("weights")) {
    pf.weights = number_array(j.at("weights"), "weights");
    if (pf.weights.size() != pf.measures.size()) {
      throw ParseError("field 'weights' must hold one entry per measure");
    }
  } else {
    pf.weights = uniform_weights(static_cast<int>(pf.measures.size()));
  }
  return pf;
}

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in '" + path + "': " + e.what());
  }
  return parse_problem_json(j);
}

nlohmann::json result_to_json(const BarycenterResult& result) {
  nlohmann::json j;
  j["dim"] = result.cov.dim();
  j["family"] = result.family;
  j["mean"] = result.mean;
  j["cov"] = result.cov.data();
  j["n_iter"] = result.n_iter;
  j["tol_reached"] = result.tol_reached;
  j["converged"] = result.converged;
  j["final_residual"] = result.final_residual;
  j["det_slack"] = result.bound_report.det_slack;
  j["trace_slack"] = result.bound_report.trace_slack;
  return j;
}

std::string trace_csv(const IterationTrace& trace) {
  std::string out = "n,v,delta_v,trace,log_det,residual\n";
  for (const StepRecord& rec : trace) {
    out += std::to_string(rec.n);
    out += ',';
    out += format_double(rec.v);
    out += ',';
    if (rec.delta_v.has_value()) out += format_double(*rec.delta_v);
    out += ',';
    out += format_double(rec.trace);
    out += ',';
    out += format_double(rec.log_det);
    out += ',';
    out += format_double(rec.residual);
    out += '\n';
  }
  return out;
}

}  // namespace wbary
