#include "nsslope/estimator.hpp"

#include <cmath>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nsslope {

namespace {

constexpr double kMinQuadraticForm = 1e-15;

}  // namespace

void FitConfig::validate() const {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("FitConfig: q must lie in (0, 1)");
  if (!(outer_tol > 0.0) || !(gap_tol > 0.0)) {
    throw DomainError("FitConfig: tolerances must be positive");
  }
  if (max_sweeps < 1 || max_iter < 1) {
    throw DomainError("FitConfig: max_sweeps and max_iter must be positive");
  }
  if (threads < 0) throw DomainError("FitConfig: threads must be >= 0");
  if (!(zero_tol >= 0.0)) throw DomainError("FitConfig: zero_tol must be >= 0");
}

Vector expand_without(const Eigen::Ref<const Vector>& beta, Eigen::Index i) {
  const Eigen::Index p = beta.size() + 1;
  Vector full(p);
  full.head(i) = beta.head(i);
  full[i] = 0.0;
  full.tail(p - i - 1) = beta.tail(p - i - 1);
  return full;
}

double update_diagonal(const Eigen::Ref<const Matrix>& S, const Eigen::Ref<const Vector>& beta,
                       Eigen::Index i) {
  const Eigen::Index p = S.rows();
  if (S.cols() != p) throw DimensionError("update_diagonal: S is not square");
  if (i < 0 || i >= p) throw DimensionError("update_diagonal: index out of range");
  if (beta.size() != p - 1) throw DimensionError("update_diagonal: beta must have length p - 1");
  const Vector full = expand_without(beta, i);
  const double cross = S.col(i).dot(full);
  const double quad = full.dot(S * full);
  const double form = S(i, i) - 2.0 * cross + quad;
  if (!(form > kMinQuadraticForm)) {
    throw SingularResidualError("update_diagonal: residual variance of column " +
                                std::to_string(i) + " is numerically zero");
  }
  return 1.0 / form;
}

Matrix symmetrize(const Eigen::Ref<const Matrix>& m) {
  if (m.rows() != m.cols()) throw DimensionError("symmetrize: matrix is not square");
  return 0.5 * (m + m.transpose());
}

ColumnProblem column_problem(const Dataset& data, Eigen::Index i, double sigma,
                             const LambdaSequence& lambda, bool standardize) {
  const Matrix& S = data.S();
  const Eigen::Index p = data.p();
  const auto n = static_cast<double>(data.n());
  if (i < 0 || i >= p) throw DimensionError("column_problem: index out of range");
  if (lambda.size() != p - 1) throw DimensionError("column_problem: lambda must have length p - 1");

  std::vector<Eigen::Index> others;
  others.reserve(static_cast<std::size_t>(p - 1));
  for (Eigen::Index j = 0; j < p; ++j) {
    if (j != i) others.push_back(j);
  }

  // Column norms of the design: ‖X_j‖ = sqrt(n S_jj).
  Vector norm(p - 1);
  for (Eigen::Index a = 0; a < p - 1; ++a) {
    norm[a] = standardize ? std::sqrt(n * S(others[a], others[a])) : 1.0;
  }

  ColumnProblem out;
  auto& g = out.problem;
  g.gram.resize(p - 1, p - 1);
  g.correlation.resize(p - 1);
  for (Eigen::Index a = 0; a < p - 1; ++a) {
    for (Eigen::Index b = 0; b < p - 1; ++b) {
      g.gram(a, b) = n * S(others[a], others[b]) / (norm[a] * norm[b]);
    }
    g.correlation[a] = n * S(others[a], i) / norm[a];
  }
  g.response_norm_sq = n * S(i, i);
  g.sigma = sigma;
  g.lambda = lambda.values();
  out.coef_scale = norm.cwiseInverse();
  return out;
}

PrecisionEstimate fit_with_lambda(const Dataset& data, const LambdaSequence& lambda,
                                  const FitConfig& config) {
  config.validate();
  const Eigen::Index p = data.p();
  const Matrix& S = data.S();
  if (lambda.size() != p - 1) throw DimensionError("fit: lambda must have length p - 1");
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(S(i, i) > kMinQuadraticForm)) {
      throw SingularResidualError("fit: column " + std::to_string(i) + " has zero variance");
    }
  }

  PrecisionEstimate est;
  est.betas.assign(static_cast<std::size_t>(p), Vector::Zero(p - 1));
  est.theta_unsymmetrized = Matrix::Zero(p, p);
  Vector diag = S.diagonal().cwiseInverse();
  est.theta_unsymmetrized.diagonal() = diag;

  SolverOptions solver;
  solver.gap_tol = config.gap_tol;
  solver.max_iter = config.max_iter;
  std::vector<double> lipschitz(static_cast<std::size_t>(p), 0.0);

  // Solves column i against the diagonal snapshot `prev` and writes only
  // slot i of every per-column container.
  auto solve_column = [&](Eigen::Index i, const Vector& prev, Vector& next) -> bool {
    const auto slot = static_cast<std::size_t>(i);
    const double sigma = 1.0 / std::sqrt(prev[i]);
    ColumnProblem cp = column_problem(data, i, sigma, lambda, config.standardize);
    const Vector warm = est.betas[slot].cwiseQuotient(cp.coef_scale);
    SolverOptions opts = solver;
    if (lipschitz[slot] > 0.0) opts.lipschitz = lipschitz[slot];
    SubproblemSolution sol = solve_slope(cp.problem, opts, &warm);
    lipschitz[slot] = sol.lipschitz;

    Vector beta = sol.beta.cwiseProduct(cp.coef_scale);
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      if (std::abs(beta[j]) < config.zero_tol) beta[j] = 0.0;
    }
    const double theta_ii = update_diagonal(S, beta, i);
    next[i] = theta_ii;
    auto column = est.theta_unsymmetrized.col(i);
    column = expand_without(-theta_ii * beta, i);
    column[i] = theta_ii;
    est.betas[slot] = std::move(beta);
    return sol.converged;
  };

  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    const Vector prev = diag;
    Vector next = diag;
    int unconverged = 0;

    if (config.mode == SweepMode::Sequential) {
      for (Eigen::Index i = 0; i < p; ++i) {
        if (!solve_column(i, prev, next)) ++unconverged;
      }
    } else {
      std::exception_ptr failure;
      std::mutex failure_mutex;
#ifdef _OPENMP
      const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads) reduction(+ : unconverged)
#endif
      for (Eigen::Index i = 0; i < p; ++i) {
        try {
          if (!solve_column(i, prev, next)) ++unconverged;
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
    }

    diag = next;
    est.unconverged_subproblems += unconverged;
    est.diagonal_history.push_back(diag);
    est.sweeps = sweep;
    if ((diag - prev).lpNorm<Eigen::Infinity>() < config.outer_tol) {
      est.converged = true;
      break;
    }
  }

  est.theta = config.symmetrize_output ? symmetrize(est.theta_unsymmetrized)
                                       : est.theta_unsymmetrized;
  return est;
}

PrecisionEstimate fit_nsslope(const Dataset& data, const FitConfig& config) {
  config.validate();
  const Eigen::Index d = data.p() - 1;
  const LambdaSequence lambda = config.use_adjusted_lambda
                                    ? adjusted_sequence(d, config.q, data.n())
                                    : bh_sequence(d, config.q);
  return fit_with_lambda(data, lambda, config);
}

PrecisionEstimate fit_mb_lasso(const Dataset& data, double alpha, FitConfig config) {
  const LambdaSequence lambda = fwer_uniform_sequence(data.p() - 1, alpha, data.p());
  return fit_with_lambda(data, lambda, config);
}

}  // namespace nsslope
