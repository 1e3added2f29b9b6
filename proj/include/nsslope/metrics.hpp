#pragma once

#include "nsslope/core.hpp"
#include "nsslope/synth.hpp"

#include <vector>

namespace nsslope {

struct MetricsReport {
  double fdr = 0.0;
  double power = 0.0;
  double mse_diag = 0.0;
  double mse_offdiag = 0.0;
  long true_positives = 0;
  long false_positives = 0;
  long total_rejections = 0;
  long true_edges = 0;
};

struct MseStats {
  double diag = 0.0;
  double offdiag = 0.0;
};

/// Discovered edges are unordered pairs i < j with |Θ̂_ij| > zero_tol in the
/// symmetrized estimate. FDR = V / (R ∨ 1), power = TP / (|truth| ∨ 1).
/// Also fills the MSE fields.
MetricsReport edge_metrics(const Eigen::Ref<const Matrix>& theta_hat,
                           const GroundTruthModel& truth, double zero_tol = 1e-10);

MseStats mse_metrics(const Eigen::Ref<const Matrix>& theta_hat, const Eigen::Ref<const Matrix>& theta);

std::vector<Edge> discovered_edges(const Eigen::Ref<const Matrix>& theta_hat, double zero_tol = 1e-10);

struct AggregateReport {
  MetricsReport mean;
  /// Standard error of the mean for each field (sample sd / sqrt(m)).
  double se_fdr = 0.0;
  double se_power = 0.0;
  double se_mse_diag = 0.0;
  double se_mse_offdiag = 0.0;
  double mean_true_positives = 0.0;
  double mean_false_positives = 0.0;
  double mean_total_rejections = 0.0;
  double se_true_positives = 0.0;
  double se_false_positives = 0.0;
  double se_total_rejections = 0.0;
  int count = 0;
};

AggregateReport aggregate(const std::vector<MetricsReport>& reports);

}  // namespace nsslope
