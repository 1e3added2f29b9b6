#include "nsslope/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace nsslope {

std::vector<Edge> discovered_edges(const Eigen::Ref<const Matrix>& theta_hat, double zero_tol) {
  if (theta_hat.rows() != theta_hat.cols()) throw DimensionError("discovered_edges: not square");
  std::vector<Edge> edges;
  const Eigen::Index p = theta_hat.rows();
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      // Averaging the two entries is what symmetrization would do.
      if (std::abs(0.5 * (theta_hat(i, j) + theta_hat(j, i))) > zero_tol) edges.emplace_back(i, j);
    }
  }
  return edges;
}

MseStats mse_metrics(const Eigen::Ref<const Matrix>& theta_hat, const Eigen::Ref<const Matrix>& theta) {
  if (theta_hat.rows() != theta.rows() || theta_hat.cols() != theta.cols() ||
      theta.rows() != theta.cols()) {
    throw DimensionError("mse_metrics: dimension mismatch");
  }
  const Eigen::Index p = theta.rows();
  const Matrix diff = theta_hat - theta;
  MseStats out;
  out.diag = diff.diagonal().squaredNorm() / static_cast<double>(p);
  if (p > 1) {
    const double off = diff.squaredNorm() - diff.diagonal().squaredNorm();
    out.offdiag = off / static_cast<double>(p * (p - 1));
  }
  return out;
}

MetricsReport edge_metrics(const Eigen::Ref<const Matrix>& theta_hat,
                           const GroundTruthModel& truth, double zero_tol) {
  if (theta_hat.rows() != truth.theta.rows() || theta_hat.cols() != truth.theta.cols()) {
    throw DimensionError("edge_metrics: dimension mismatch");
  }
  const std::set<Edge> true_set(truth.edges.begin(), truth.edges.end());
  const auto found = discovered_edges(theta_hat, zero_tol);

  MetricsReport r;
  r.true_edges = static_cast<long>(true_set.size());
  r.total_rejections = static_cast<long>(found.size());
  for (const auto& e : found) {
    if (true_set.count(e)) {
      ++r.true_positives;
    } else {
      ++r.false_positives;
    }
  }
  r.fdr = static_cast<double>(r.false_positives) /
          static_cast<double>(std::max<long>(r.total_rejections, 1));
  r.power = static_cast<double>(r.true_positives) /
            static_cast<double>(std::max<long>(r.true_edges, 1));
  const MseStats mse = mse_metrics(theta_hat, truth.theta);
  r.mse_diag = mse.diag;
  r.mse_offdiag = mse.offdiag;
  return r;
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<MetricsReport>& reports,
               const std::function<double(const MetricsReport&)>& field) {
  const auto m = static_cast<double>(reports.size());
  double sum = 0.0;
  for (const auto& r : reports) sum += field(r);
  MeanSe out;
  out.mean = sum / m;
  if (reports.size() > 1) {
    double ss = 0.0;
    for (const auto& r : reports) ss += (field(r) - out.mean) * (field(r) - out.mean);
    out.se = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
  }
  return out;
}

}  // namespace

AggregateReport aggregate(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw DomainError("aggregate: no reports");
  AggregateReport a;
  a.count = static_cast<int>(reports.size());

  const auto fdr = mean_se(reports, [](const MetricsReport& r) { return r.fdr; });
  const auto power = mean_se(reports, [](const MetricsReport& r) { return r.power; });
  const auto md = mean_se(reports, [](const MetricsReport& r) { return r.mse_diag; });
  const auto mo = mean_se(reports, [](const MetricsReport& r) { return r.mse_offdiag; });
  const auto tp = mean_se(reports, [](const MetricsReport& r) { return double(r.true_positives); });
  const auto fp = mean_se(reports, [](const MetricsReport& r) { return double(r.false_positives); });
  const auto rj = mean_se(reports, [](const MetricsReport& r) { return double(r.total_rejections); });

  a.mean.fdr = fdr.mean;
  a.mean.power = power.mean;
  a.mean.mse_diag = md.mean;
  a.mean.mse_offdiag = mo.mean;
  a.mean.true_edges = reports.front().true_edges;
  a.mean.true_positives = std::lround(tp.mean);
  a.mean.false_positives = std::lround(fp.mean);
  a.mean.total_rejections = std::lround(rj.mean);
  a.se_fdr = fdr.se;
  a.se_power = power.se;
  a.se_mse_diag = md.se;
  a.se_mse_offdiag = mo.se;
  a.mean_true_positives = tp.mean;
  a.mean_false_positives = fp.mean;
  a.mean_total_rejections = rj.mean;
  a.se_true_positives = tp.se;
  a.se_false_positives = fp.se;
  a.se_total_rejections = rj.se;
  return a;
}

}  // namespace nsslope
