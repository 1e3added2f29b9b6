#include "nsslope/sorted_l1.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nsslope {

LambdaSequence::LambdaSequence(Vector values) : values_(std::move(values)) {
  if (values_.size() == 0) throw DimensionError("LambdaSequence: empty");
  require_finite(values_, "LambdaSequence");
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0)) {
      throw DomainError("LambdaSequence: entry " + std::to_string(i) + " is not positive");
    }
    if (i > 0 && values_[i] > values_[i - 1]) {
      throw DomainError("LambdaSequence: increases at entry " + std::to_string(i));
    }
  }
}

LambdaSequence::LambdaSequence(const std::vector<double>& values)
    : LambdaSequence(Vector(Eigen::Map<const Vector>(values.data(),
                                                     static_cast<Eigen::Index>(values.size())))) {}

LambdaSequence LambdaSequence::uniform(Eigen::Index d, double value) {
  return LambdaSequence(Vector::Constant(d, value));
}

LambdaSequence LambdaSequence::scaled(double factor) const {
  return LambdaSequence(Vector(values_ * factor));
}

double sorted_l1_norm(const Eigen::Ref<const Vector>& beta, const LambdaSequence& lambda) {
  if (beta.size() != lambda.size()) {
    throw DimensionError("sorted_l1_norm: length mismatch");
  }
  std::vector<double> mag(static_cast<std::size_t>(beta.size()));
  for (Eigen::Index i = 0; i < beta.size(); ++i) mag[static_cast<std::size_t>(i)] = std::abs(beta[i]);
  std::sort(mag.begin(), mag.end(), std::greater<>());
  double total = 0.0;
  for (Eigen::Index i = 0; i < beta.size(); ++i) total += lambda[i] * mag[static_cast<std::size_t>(i)];
  return total;
}

void prox_sorted_l1(const Eigen::Ref<const Vector>& z, const Vector& lambda, double scale,
                    Eigen::Ref<Vector> out, ProxWorkspace& ws) {
  const Eigen::Index d = z.size();
  if (lambda.size() != d || out.size() != d) {
    throw DimensionError("prox_sorted_l1: length mismatch");
  }
  const auto n = static_cast<std::size_t>(d);
  ws.order.resize(n);
  ws.magnitude.resize(n);
  ws.block_sum.resize(n);
  ws.block_start.resize(n);
  ws.block_end.resize(n);

  std::iota(ws.order.begin(), ws.order.end(), Eigen::Index{0});
  std::stable_sort(ws.order.begin(), ws.order.end(), [&z](Eigen::Index a, Eigen::Index b) {
    return std::abs(z[a]) > std::abs(z[b]);
  });
  for (std::size_t k = 0; k < n; ++k) ws.magnitude[k] = std::abs(z[ws.order[k]]);

  // Pool adjacent violators on w_k = |z|_(k) − λ_k so that block averages
  // come out nonincreasing. Each stack entry is one pooled block.
  std::size_t top = 0;
  for (std::size_t k = 0; k < n; ++k) {
    ws.block_start[top] = static_cast<Eigen::Index>(k);
    ws.block_end[top] = static_cast<Eigen::Index>(k);
    ws.block_sum[top] = ws.magnitude[k] - scale * lambda[static_cast<Eigen::Index>(k)];
    while (top > 0) {
      const double len_top =
          static_cast<double>(ws.block_end[top] - ws.block_start[top] + 1);
      const double len_below =
          static_cast<double>(ws.block_end[top - 1] - ws.block_start[top - 1] + 1);
      if (ws.block_sum[top - 1] / len_below >= ws.block_sum[top] / len_top) break;
      ws.block_sum[top - 1] += ws.block_sum[top];
      ws.block_end[top - 1] = ws.block_end[top];
      --top;
    }
    ++top;
  }

  // Clip pooled means at zero and scatter back through the permutation.
  // Signs are read before writing, since out may alias z.
  for (std::size_t b = 0; b < top; ++b) {
    const double len = static_cast<double>(ws.block_end[b] - ws.block_start[b] + 1);
    const double value = std::max(ws.block_sum[b] / len, 0.0);
    for (Eigen::Index k = ws.block_start[b]; k <= ws.block_end[b]; ++k) {
      const Eigen::Index idx = ws.order[static_cast<std::size_t>(k)];
      const double zi = z[idx];
      out[idx] = zi < 0.0 ? -value : (zi > 0.0 ? value : 0.0);
    }
  }
}

Vector prox_sorted_l1(const Eigen::Ref<const Vector>& z, const LambdaSequence& lambda) {
  Vector out(z.size());
  ProxWorkspace ws;
  prox_sorted_l1(z, lambda.values(), 1.0, out, ws);
  return out;
}

}  // namespace nsslope
