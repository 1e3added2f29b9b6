#pragma once

#include "nsslope/sorted_l1.hpp"

#include <optional>
#include <vector>

namespace nsslope {

/// One SLOPE regression: minimize ½‖b − Aβ‖² + σ·J_λ(β).
class SubproblemSpec {
 public:
  SubproblemSpec(Matrix design, Vector response, double sigma, LambdaSequence lambda);

  [[nodiscard]] const Matrix& design() const { return design_; }
  [[nodiscard]] const Vector& response() const { return response_; }
  [[nodiscard]] double sigma() const { return sigma_; }
  [[nodiscard]] const LambdaSequence& lambda() const { return lambda_; }

 private:
  Matrix design_;
  Vector response_;
  double sigma_;
  LambdaSequence lambda_;
};

/// The same problem expressed through G = AᵀA, c = Aᵀb and ‖b‖²; the
/// estimator builds these straight from the sample covariance.
struct GramSubproblem {
  Matrix gram;
  Vector correlation;
  double response_norm_sq = 0.0;
  double sigma = 1.0;
  Vector lambda;

  static GramSubproblem from(const SubproblemSpec& spec);
  void validate() const;
};

struct SolverOptions {
  double gap_tol = 1e-7;
  int max_iter = 20000;
  int gap_check_every = 10;
  double lipschitz_margin = 1.05;
  double power_iteration_tol = 1e-6;
  /// Reuse a Lipschitz constant computed earlier for the same Gram matrix.
  std::optional<double> lipschitz;
  bool record_objective = false;
};

struct SubproblemSolution {
  Vector beta;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  double lipschitz = 0.0;
  /// Objective at each accepted iterate, filled when record_objective is set.
  std::vector<double> objective_history;
};

SubproblemSolution solve_slope(const SubproblemSpec& spec, const SolverOptions& options = {},
                               const Vector* warm_start = nullptr);
SubproblemSolution solve_slope(const GramSubproblem& problem, const SolverOptions& options = {},
                               const Vector* warm_start = nullptr);

double primal_objective(const SubproblemSpec& spec, const Eigen::Ref<const Vector>& beta);
double primal_objective(const GramSubproblem& problem, const Eigen::Ref<const Vector>& beta);

/// Primal minus the dual value at the rescaled residual r / max(1, s), where
/// s is the sorted-ℓ1 dual norm of Aᵀr relative to σλ.
double duality_gap(const SubproblemSpec& spec, const Eigen::Ref<const Vector>& beta);
double duality_gap(const GramSubproblem& problem, const Eigen::Ref<const Vector>& beta);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double largest_eigenvalue(const Eigen::Ref<const Matrix>& sym, double rel_tol = 1e-6,
                          int max_iter = 10000);

}  // namespace nsslope
