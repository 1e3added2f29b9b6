#pragma once

#include "nsslope/core.hpp"

#include <vector>

namespace nsslope {

/// Nonincreasing, strictly positive weights λ₁ ≥ … ≥ λ_d > 0.
/// Equal neighbours are allowed (plain ℓ1 is the all-equal case).
class LambdaSequence {
 public:
  explicit LambdaSequence(Vector values);
  explicit LambdaSequence(const std::vector<double>& values);

  static LambdaSequence uniform(Eigen::Index d, double value);

  [[nodiscard]] Eigen::Index size() const { return values_.size(); }
  [[nodiscard]] double operator[](Eigen::Index i) const { return values_[i]; }
  [[nodiscard]] const Vector& values() const { return values_; }

  [[nodiscard]] LambdaSequence scaled(double factor) const;

 private:
  Vector values_;
};

/// J_λ(β) = Σ λ_i |β|_(i), magnitudes sorted in decreasing order.
double sorted_l1_norm(const Eigen::Ref<const Vector>& beta, const LambdaSequence& lambda);

/// Scratch buffers for repeated prox evaluations of the same dimension.
struct ProxWorkspace {
  std::vector<Eigen::Index> order;
  std::vector<double> magnitude;
  std::vector<double> block_sum;
  std::vector<Eigen::Index> block_start;
  std::vector<Eigen::Index> block_end;
};

/// argmin_x ½‖x − z‖² + J_λ(x).
Vector prox_sorted_l1(const Eigen::Ref<const Vector>& z, const LambdaSequence& lambda);

/// Allocation-free variant computing prox of J_{scale·λ} into `out`.
/// `out` may alias `z`.
void prox_sorted_l1(const Eigen::Ref<const Vector>& z, const Vector& lambda, double scale,
                    Eigen::Ref<Vector> out, ProxWorkspace& ws);

}  // namespace nsslope
