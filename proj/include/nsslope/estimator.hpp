#pragma once

#include "nsslope/core.hpp"
#include "nsslope/lambda_seq.hpp"
#include "nsslope/slope_solver.hpp"

#include <vector>

namespace nsslope {

enum class SweepMode {
  /// Columns solved one after another in ascending order. Serial reference.
  Sequential,
  /// All columns of a sweep solved concurrently (OpenMP) against the
  /// previous sweep's diagonal, joined at a barrier.
  JacobiParallel,
};

struct FitConfig {
  double q = 0.05;
  double outer_tol = 1e-3;
  double gap_tol = 1e-7;
  int max_sweeps = 100;
  int max_iter = 20000;
  SweepMode mode = SweepMode::Sequential;
  bool use_adjusted_lambda = true;
  /// Solve each regression on unit-norm design columns and map the
  /// coefficients back, so σ̂·λ is on the scale of the noise in Aᵀr.
  bool standardize = true;
  /// Return the symmetric projection of the column estimate (otherwise the
  /// raw column estimate is returned in `theta` as well).
  bool symmetrize_output = true;
  /// Worker count for JacobiParallel; 0 keeps the OpenMP default.
  int threads = 0;
  /// |β_j| below this is stored as an exact zero.
  double zero_tol = 1e-10;

  void validate() const;
};

struct PrecisionEstimate {
  Matrix theta;
  /// Column-wise estimate before symmetrization: column i holds Θ̂_ii on the
  /// diagonal and −Θ̂_ii·β̂^i elsewhere.
  Matrix theta_unsymmetrized;
  /// β̂^i for each column, length p − 1, other variables in ascending order.
  std::vector<Vector> betas;
  /// Diagonal after each sweep.
  std::vector<Vector> diagonal_history;
  int sweeps = 0;
  bool converged = false;
  /// Sub-problem solves that stopped on max_iter, over the whole fit.
  int unconverged_subproblems = 0;
};

/// nsSLOPE: per-column SLOPE regressions with weights from the BH family.
PrecisionEstimate fit_nsslope(const Dataset& data, const FitConfig& config = {});

/// ℓ1 neighbourhood selection with the single FWER-calibrated level
/// Φ⁻¹(1 − α/2p), run through the same machinery as fit_nsslope.
PrecisionEstimate fit_mb_lasso(const Dataset& data, double alpha, FitConfig config = {});

/// Shared outer loop for any weight sequence of length p − 1.
PrecisionEstimate fit_with_lambda(const Dataset& data, const LambdaSequence& lambda,
                                  const FitConfig& config);

/// (S_ii − 2βᵀS_{−i,i} + βᵀS_{−i,−i}β)⁻¹, i.e. n / RSS of the i-th regression.
double update_diagonal(const Eigen::Ref<const Matrix>& S, const Eigen::Ref<const Vector>& beta,
                       Eigen::Index i);

/// Frobenius projection onto symmetric matrices, (M + Mᵀ)/2.
Matrix symmetrize(const Eigen::Ref<const Matrix>& m);

/// The i-th regression in Gram form, built from S. `coef_scale` maps the
/// solver's coefficients back to the original variables: β = γ ∘ coef_scale.
struct ColumnProblem {
  GramSubproblem problem;
  Vector coef_scale;
};

ColumnProblem column_problem(const Dataset& data, Eigen::Index i, double sigma,
                             const LambdaSequence& lambda, bool standardize);

/// Inserts a zero at position i: maps β^i to a length-p vector.
Vector expand_without(const Eigen::Ref<const Vector>& beta, Eigen::Index i);

}  // namespace nsslope
