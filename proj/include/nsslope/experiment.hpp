#pragma once

#include "nsslope/estimator.hpp"
#include "nsslope/metrics.hpp"
#include "nsslope/synth.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace nsslope {

enum class Method { NsSlope, MbLasso };

Method parse_method(const std::string& name);
std::string to_string(Method m);

/// Runs one estimator with the level that belongs to it (q or alpha).
PrecisionEstimate fit_method(Method method, const Dataset& data, double q, double alpha,
                             FitConfig config);

struct SweepGrid {
  /// Model, repetitions, seed and levels; `base.n` is ignored.
  ExperimentConfig base;
  std::vector<Eigen::Index> n_values;
  std::vector<Method> methods{Method::NsSlope, Method::MbLasso};
  FitConfig fit;
  /// Worker count for the cell pool; 0 keeps the OpenMP default.
  int threads = 0;
  /// Replaces the estimator call when set (used to inject failures).
  std::function<PrecisionEstimate(Method, const Dataset&)> fitter;
};

struct SweepRow {
  Method method = Method::NsSlope;
  Eigen::Index n = 0;
  int repetition = 0;
  std::uint64_t seed = 0;
  MetricsReport metrics;
  int sweeps = 0;
  bool converged = false;
  int unconverged_subproblems = 0;
  /// Empty on success; otherwise the failure message and metrics are unset.
  std::string error;
};

struct SweepCell {
  Method method = Method::NsSlope;
  Eigen::Index n = 0;
  AggregateReport summary;
  int failures = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepCell> cells;
};

/// Every (n, repetition) pair draws one dataset with seed base.seed + rep and
/// fits every method on it. Rows come back ordered by method, n, repetition
/// regardless of how the pool scheduled them. A failing fit is recorded in
/// its row and the sweep carries on.
SweepResult run_sweep(const SweepGrid& grid);

void write_rows_csv(std::ostream& out, const std::vector<SweepRow>& rows);
nlohmann::json to_json(const MetricsReport& r);
nlohmann::json to_json(const AggregateReport& a);
nlohmann::json to_json(const ExperimentConfig& c);
nlohmann::json cells_to_json(const std::vector<SweepCell>& cells);

/// Resolves a worker count: an explicit positive request wins, then the
/// NSSLOPE_THREADS environment variable, then 0 (runtime default).
int resolve_threads(int requested);

}  // namespace nsslope
