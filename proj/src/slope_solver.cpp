#include "nsslope/slope_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace nsslope {

SubproblemSpec::SubproblemSpec(Matrix design, Vector response, double sigma,
                               LambdaSequence lambda)
    : design_(std::move(design)),
      response_(std::move(response)),
      sigma_(sigma),
      lambda_(std::move(lambda)) {
  if (design_.rows() != response_.size()) {
    throw DimensionError("SubproblemSpec: design rows do not match response length");
  }
  if (design_.cols() != lambda_.size()) {
    throw DimensionError("SubproblemSpec: design columns do not match lambda length");
  }
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw DomainError("SubproblemSpec: sigma must be positive and finite");
  }
  require_finite(design_, "SubproblemSpec design");
  require_finite(response_, "SubproblemSpec response");
}

GramSubproblem GramSubproblem::from(const SubproblemSpec& spec) {
  GramSubproblem g;
  g.gram = spec.design().transpose() * spec.design();
  g.correlation = spec.design().transpose() * spec.response();
  g.response_norm_sq = spec.response().squaredNorm();
  g.sigma = spec.sigma();
  g.lambda = spec.lambda().values();
  return g;
}

void GramSubproblem::validate() const {
  const Eigen::Index d = lambda.size();
  if (gram.rows() != d || gram.cols() != d || correlation.size() != d) {
    throw DimensionError("GramSubproblem: inconsistent dimensions");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("GramSubproblem: sigma must be positive and finite");
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(lambda[i] > 0.0) || (i > 0 && lambda[i] > lambda[i - 1])) {
      throw DomainError("GramSubproblem: lambda must be positive and nonincreasing");
    }
  }
}

namespace {

double penalty(const Vector& lambda, const Eigen::Ref<const Vector>& beta,
               std::vector<double>& scratch) {
  scratch.resize(static_cast<std::size_t>(beta.size()));
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    scratch[static_cast<std::size_t>(i)] = std::abs(beta[i]);
  }
  std::sort(scratch.begin(), scratch.end(), std::greater<>());
  double total = 0.0;
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    total += lambda[i] * scratch[static_cast<std::size_t>(i)];
  }
  return total;
}

// max_k Σ_{i≤k} |v|_(i) / Σ_{i≤k} w_i: the factor by which v overshoots
// the dual ball of J_w. Callers pass w = σλ.
double dual_norm_ratio(const Eigen::Ref<const Vector>& v, const Vector& weights,
                       std::vector<double>& scratch) {
  scratch.resize(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) scratch[static_cast<std::size_t>(i)] = std::abs(v[i]);
  std::sort(scratch.begin(), scratch.end(), std::greater<>());
  double num = 0.0;
  double den = 0.0;
  double ratio = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    num += scratch[static_cast<std::size_t>(i)];
    den += weights[i];
    ratio = std::max(ratio, num / den);
  }
  return ratio;
}

// dual(θ) with θ = r/s, written through bᵀr and ‖r‖².
double dual_value(double b_dot_r, double r_norm_sq, double scale) {
  return b_dot_r / scale - 0.5 * r_norm_sq / (scale * scale);
}

// σ is folded into the weights once, so (σ, λ) and (1, σλ) run identical
// floating-point operations.
struct GapEvaluator {
  const GramSubproblem& problem;
  Vector weights;
  std::vector<double> scratch;

  double operator()(const Vector& beta, const Vector& gram_beta) {
    const double c_beta = problem.correlation.dot(beta);
    const double quad = beta.dot(gram_beta);
    const double r_norm_sq = std::max(problem.response_norm_sq - 2.0 * c_beta + quad, 0.0);
    const double primal = 0.5 * r_norm_sq + penalty(weights, beta, scratch);
    const Vector at_r = problem.correlation - gram_beta;
    const double scale = std::max(1.0, dual_norm_ratio(at_r, weights, scratch));
    const double b_dot_r = problem.response_norm_sq - c_beta;
    return primal - dual_value(b_dot_r, r_norm_sq, scale);
  }
};

}  // namespace

double largest_eigenvalue(const Eigen::Ref<const Matrix>& sym, double rel_tol, int max_iter) {
  const Eigen::Index d = sym.rows();
  if (sym.cols() != d) throw DimensionError("largest_eigenvalue: matrix not square");
  if (d == 0) return 0.0;
  // Fixed, non-constant start so it is unlikely to be orthogonal to the
  // leading eigenvector.
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = sym * v;
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(next - estimate) <= rel_tol * std::abs(next)) return next;
    estimate = next;
  }
  return estimate;
}

double primal_objective(const SubproblemSpec& spec, const Eigen::Ref<const Vector>& beta) {
  if (beta.size() != spec.design().cols()) throw DimensionError("primal_objective: bad beta length");
  const Vector r = spec.response() - spec.design() * beta;
  return 0.5 * r.squaredNorm() + spec.sigma() * sorted_l1_norm(beta, spec.lambda());
}

double primal_objective(const GramSubproblem& problem, const Eigen::Ref<const Vector>& beta) {
  problem.validate();
  if (beta.size() != problem.lambda.size()) throw DimensionError("primal_objective: bad beta length");
  std::vector<double> scratch;
  const double smooth = 0.5 * problem.response_norm_sq - problem.correlation.dot(beta) +
                        0.5 * beta.dot(problem.gram * beta);
  return smooth + penalty(Vector(problem.sigma * problem.lambda), beta, scratch);
}

double duality_gap(const SubproblemSpec& spec, const Eigen::Ref<const Vector>& beta) {
  if (beta.size() != spec.design().cols()) throw DimensionError("duality_gap: bad beta length");
  std::vector<double> scratch;
  const Vector& b = spec.response();
  const Vector weights = spec.sigma() * spec.lambda().values();
  const Vector r = b - spec.design() * beta;
  const double primal = 0.5 * r.squaredNorm() + penalty(weights, beta, scratch);
  const Vector at_r = spec.design().transpose() * r;
  const double scale = std::max(1.0, dual_norm_ratio(at_r, weights, scratch));
  const Vector theta = r / scale;
  const double dual = 0.5 * b.squaredNorm() - 0.5 * (b - theta).squaredNorm();
  return primal - dual;
}

double duality_gap(const GramSubproblem& problem, const Eigen::Ref<const Vector>& beta) {
  problem.validate();
  if (beta.size() != problem.lambda.size()) throw DimensionError("duality_gap: bad beta length");
  GapEvaluator gap{problem, problem.sigma * problem.lambda, {}};
  const Vector b = beta;
  return gap(b, problem.gram * b);
}

SubproblemSolution solve_slope(const SubproblemSpec& spec, const SolverOptions& options,
                               const Vector* warm_start) {
  return solve_slope(GramSubproblem::from(spec), options, warm_start);
}

SubproblemSolution solve_slope(const GramSubproblem& problem, const SolverOptions& options,
                               const Vector* warm_start) {
  problem.validate();
  if (!(options.gap_tol > 0.0)) throw DomainError("solve_slope: gap_tol must be positive");
  if (options.max_iter < 1) throw DomainError("solve_slope: max_iter must be positive");
  const Eigen::Index d = problem.lambda.size();

  SubproblemSolution out;
  out.lipschitz = options.lipschitz
                      ? *options.lipschitz
                      : options.lipschitz_margin *
                            largest_eigenvalue(problem.gram, options.power_iteration_tol);
  double lipschitz = out.lipschitz > 0.0 ? out.lipschitz : 1.0;

  Vector x = Vector::Zero(d);
  if (warm_start) {
    if (warm_start->size() != d) throw DimensionError("solve_slope: warm start has wrong length");
    x = *warm_start;
  }

  std::vector<double> scratch;
  GapEvaluator gap_of{problem, problem.sigma * problem.lambda, {}};
  const Vector& weights = gap_of.weights;
  auto smooth = [&](const Vector& v, const Vector& gram_v) {
    return 0.5 * problem.response_norm_sq - problem.correlation.dot(v) + 0.5 * v.dot(gram_v);
  };

  Vector gram_x = problem.gram * x;
  double objective_x = smooth(x, gram_x) + penalty(weights, x, scratch);
  if (options.record_objective) out.objective_history.push_back(objective_x);

  out.gap = gap_of(x, gram_x);
  if (out.gap <= options.gap_tol) {
    out.beta = std::move(x);
    out.converged = true;
    return out;
  }

  Vector x_prev = x;
  Vector y = x;
  Vector z(d);
  Vector gram_y(d);
  Vector gram_z(d);
  Vector grad(d);
  ProxWorkspace ws;
  double t = 1.0;

  for (int it = 1; it <= options.max_iter; ++it) {
    gram_y.noalias() = problem.gram * y;
    grad = gram_y - problem.correlation;
    const double smooth_y = smooth(y, gram_y);

    // Backtrack only if the estimated constant fails the majorization test.
    double smooth_z = 0.0;
    while (true) {
      z = y - grad / lipschitz;
      prox_sorted_l1(z, weights, 1.0 / lipschitz, z, ws);
      gram_z.noalias() = problem.gram * z;
      smooth_z = smooth(z, gram_z);
      const Vector step = z - y;
      const double bound = smooth_y + grad.dot(step) + 0.5 * lipschitz * step.squaredNorm();
      if (smooth_z <= bound + 1e-12 * std::max(1.0, std::abs(bound))) break;
      lipschitz *= 2.0;
    }
    const double objective_z = smooth_z + penalty(weights, z, scratch);

    // Monotone acceleration: keep the previous iterate if z is worse.
    x_prev = x;
    if (objective_z <= objective_x) {
      x = z;
      gram_x = gram_z;
      objective_x = objective_z;
    }
    if (options.record_objective) out.objective_history.push_back(objective_x);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x + (t / t_next) * (z - x) + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;

    out.iterations = it;
    if (it % options.gap_check_every == 0 || it == options.max_iter) {
      out.gap = gap_of(x, gram_x);
      if (out.gap <= options.gap_tol) {
        out.converged = true;
        break;
      }
    }
  }
  out.lipschitz = lipschitz;
  out.beta = std::move(x);
  return out;
}

}  // namespace nsslope
