#include "nsslope/experiment.hpp"

#include "nsslope/csv.hpp"

#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nsslope {

Method parse_method(const std::string& name) {
  if (name == "nsslope") return Method::NsSlope;
  if (name == "mblasso") return Method::MbLasso;
  throw DomainError("unknown method '" + name + "' (expected nsslope or mblasso)");
}

std::string to_string(Method m) { return m == Method::NsSlope ? "nsslope" : "mblasso"; }

PrecisionEstimate fit_method(Method method, const Dataset& data, double q, double alpha,
                             FitConfig config) {
  if (method == Method::NsSlope) {
    config.q = q;
    return fit_nsslope(data, config);
  }
  return fit_mb_lasso(data, alpha, config);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NSSLOPE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 0;
}

SweepResult run_sweep(const SweepGrid& grid) {
  ExperimentConfig base = grid.base;
  if (grid.n_values.empty()) throw DomainError("run_sweep: no sample sizes");
  if (grid.methods.empty()) throw DomainError("run_sweep: no methods");
  for (const auto n : grid.n_values) {
    base.n = n;
    base.validate();
  }
  grid.fit.validate();
  const GroundTruthModel truth = base.make_model();

  const auto n_count = static_cast<long>(grid.n_values.size());
  const long reps = base.repetitions;
  const auto m_count = static_cast<long>(grid.methods.size());
  const long tasks = n_count * reps;

  // rows[(m * n_count + ni) * reps + rep]
  std::vector<SweepRow> rows(static_cast<std::size_t>(m_count * tasks));
  FitConfig fit = grid.fit;
  fit.mode = SweepMode::Sequential;

#ifdef _OPENMP
  const int resolved = resolve_threads(grid.threads);
  const int threads = resolved > 0 ? resolved : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (long task = 0; task < tasks; ++task) {
    const long ni = task / reps;
    const long rep = task % reps;
    const Eigen::Index n = grid.n_values[static_cast<std::size_t>(ni)];
    const std::uint64_t seed = base.seed + static_cast<std::uint64_t>(rep);

    std::string data_error;
    std::optional<Dataset> data;
    try {
      data = sample_mvn(truth, n, seed);
    } catch (const std::exception& e) {
      data_error = e.what();
    }

    for (long m = 0; m < m_count; ++m) {
      auto& row = rows[static_cast<std::size_t>((m * n_count + ni) * reps + rep)];
      row.method = grid.methods[static_cast<std::size_t>(m)];
      row.n = n;
      row.repetition = static_cast<int>(rep);
      row.seed = seed;
      if (!data) {
        row.error = data_error;
        continue;
      }
      try {
        const auto est = grid.fitter ? grid.fitter(row.method, *data)
                                     : fit_method(row.method, *data, base.q, base.alpha, fit);
        row.metrics = edge_metrics(est.theta, truth);
        row.sweeps = est.sweeps;
        row.converged = est.converged;
        row.unconverged_subproblems = est.unconverged_subproblems;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  }

  SweepResult result;
  result.rows = std::move(rows);
  for (long m = 0; m < m_count; ++m) {
    for (long ni = 0; ni < n_count; ++ni) {
      SweepCell cell;
      cell.method = grid.methods[static_cast<std::size_t>(m)];
      cell.n = grid.n_values[static_cast<std::size_t>(ni)];
      std::vector<MetricsReport> ok;
      for (long rep = 0; rep < reps; ++rep) {
        const auto& row = result.rows[static_cast<std::size_t>((m * n_count + ni) * reps + rep)];
        if (row.error.empty()) {
          ok.push_back(row.metrics);
        } else {
          ++cell.failures;
        }
      }
      if (!ok.empty()) cell.summary = aggregate(ok);
      result.cells.push_back(cell);
    }
  }
  return result;
}

void write_rows_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  using csv::format_double;
  out << "method,n,repetition,seed,fdr,power,mse_diag,mse_offdiag,true_positives,"
         "false_positives,total_rejections,true_edges,sweeps,converged,"
         "unconverged_subproblems,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    for (auto& ch : err) {
      if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
    }
    out << to_string(r.method) << ',' << r.n << ',' << r.repetition << ',' << r.seed << ','
        << format_double(r.metrics.fdr) << ',' << format_double(r.metrics.power) << ','
        << format_double(r.metrics.mse_diag) << ',' << format_double(r.metrics.mse_offdiag) << ','
        << r.metrics.true_positives << ',' << r.metrics.false_positives << ','
        << r.metrics.total_rejections << ',' << r.metrics.true_edges << ',' << r.sweeps << ','
        << (r.converged ? 1 : 0) << ',' << r.unconverged_subproblems << ',' << err << '\n';
  }
}

nlohmann::json to_json(const MetricsReport& r) {
  return {{"fdr", r.fdr},
          {"power", r.power},
          {"mse_diag", r.mse_diag},
          {"mse_offdiag", r.mse_offdiag},
          {"true_positives", r.true_positives},
          {"false_positives", r.false_positives},
          {"total_rejections", r.total_rejections},
          {"true_edges", r.true_edges}};
}

nlohmann::json to_json(const AggregateReport& a) {
  return {{"count", a.count},
          {"mean",
           {{"fdr", a.mean.fdr},
            {"power", a.mean.power},
            {"mse_diag", a.mean.mse_diag},
            {"mse_offdiag", a.mean.mse_offdiag},
            {"true_positives", a.mean_true_positives},
            {"false_positives", a.mean_false_positives},
            {"total_rejections", a.mean_total_rejections},
            {"true_edges", a.mean.true_edges}}},
          {"se",
           {{"fdr", a.se_fdr},
            {"power", a.se_power},
            {"mse_diag", a.se_mse_diag},
            {"mse_offdiag", a.se_mse_offdiag},
            {"true_positives", a.se_true_positives},
            {"false_positives", a.se_false_positives},
            {"total_rejections", a.se_total_rejections}}}};
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"structure", to_string(c.structure)},
          {"p", c.p},
          {"n", c.n},
          {"block_size", c.block_size},
          {"diag_value", c.diag_value},
          {"off_value", c.off_value},
          {"hub_value", c.hub_value},
          {"repetitions", c.repetitions},
          {"seed", c.seed},
          {"q", c.q},
          {"alpha", c.alpha}};
}

nlohmann::json cells_to_json(const std::vector<SweepCell>& cells) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json j = {{"method", to_string(c.method)}, {"n", c.n}, {"failures", c.failures}};
    if (c.summary.count > 0) j["summary"] = to_json(c.summary);
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace nsslope
