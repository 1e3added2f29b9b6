#pragma once

// Independent reference computations used only by the tests. None of these
// call into the prox, solver or quantile code they are checking.

#include "nsslope/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using nsslope::Matrix;
using nsslope::Vector;

/// Φ⁻¹ by bisection on the long-double complementary error function.
inline double normal_quantile(double prob) {
  long double lo = -40.0L;
  long double hi = 40.0L;
  const long double target = prob;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    const long double cdf = 0.5L * std::erfc(-mid / std::sqrt(2.0L));
    (cdf < target ? lo : hi) = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

inline long double normal_cdf(double z) {
  return 0.5L * std::erfc(-static_cast<long double>(z) / std::sqrt(2.0L));
}

inline double sorted_l1(const Vector& x, const Vector& lambda) {
  std::vector<double> mag(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) mag[static_cast<std::size_t>(i)] = std::abs(x[i]);
  std::sort(mag.rbegin(), mag.rend());
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += lambda[i] * mag[static_cast<std::size_t>(i)];
  return s;
}

struct SortedMagnitudes {
  std::vector<Eigen::Index> order;
  Vector values;
};

inline SortedMagnitudes sort_magnitudes(const Vector& z) {
  SortedMagnitudes s;
  s.order.resize(static_cast<std::size_t>(z.size()));
  std::iota(s.order.begin(), s.order.end(), Eigen::Index{0});
  std::stable_sort(s.order.begin(), s.order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(z[a]) > std::abs(z[b]); });
  s.values.resize(z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) s.values[k] = std::abs(z[s.order[static_cast<std::size_t>(k)]]);
  return s;
}

inline Vector unsort_with_signs(const Vector& z, const SortedMagnitudes& s, const Vector& y) {
  Vector x(z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const Eigen::Index idx = s.order[static_cast<std::size_t>(k)];
    x[idx] = z[idx] < 0 ? -y[k] : (z[idx] > 0 ? y[k] : 0.0);
  }
  return x;
}

/// Prox by brute-force QP: on sorted magnitudes the problem is
///   min ½‖y − (|z|↓ − λ)‖²  s.t.  y₁ ≥ … ≥ y_d ≥ 0,
/// solved by trying every active set of the d linear constraints and keeping
/// the one that satisfies the KKT conditions.
inline Vector prox_qp(const Vector& z, const Vector& lambda) {
  const Eigen::Index d = z.size();
  const SortedMagnitudes s = sort_magnitudes(z);
  const Vector w = s.values - lambda;
  // Constraint k: y_k − y_{k+1} ≥ 0 for k < d − 1, y_{d−1} ≥ 0.
  Matrix c = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    c(k, k) = 1.0;
    if (k + 1 < d) c(k, k + 1) = -1.0;
  }
  const double tol = 1e-11;
  Vector best;
  double best_violation = INFINITY;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index k = 0; k < d; ++k) {
      if (mask & (1u << k)) active.push_back(k);
    }
    Vector y = w;
    Vector mu;
    if (!active.empty()) {
      Matrix ca(static_cast<Eigen::Index>(active.size()), d);
      for (std::size_t a = 0; a < active.size(); ++a) ca.row(static_cast<Eigen::Index>(a)) = c.row(active[a]);
      mu = -(ca * ca.transpose()).ldlt().solve(ca * w);
      y = w + ca.transpose() * mu;
    }
    double violation = 0.0;
    violation = std::max(violation, -(c * y).minCoeff());
    if (mu.size() > 0) violation = std::max(violation, -mu.minCoeff());
    if (violation < best_violation) {
      best_violation = violation;
      best = y;
    }
    if (violation <= tol) break;
  }
  return unsort_with_signs(z, s, best);
}

/// Prox through the min-max formula for antitonic regression,
///   y_i = max_{j≤i} min_{k≥i} mean(w_j..w_k),
/// clipped at zero.
inline Vector prox_maxmin(const Vector& z, const Vector& lambda) {
  const Eigen::Index d = z.size();
  const SortedMagnitudes s = sort_magnitudes(z);
  const Vector w = s.values - lambda;
  std::vector<double> prefix(static_cast<std::size_t>(d + 1), 0.0);
  for (Eigen::Index i = 0; i < d; ++i) prefix[static_cast<std::size_t>(i + 1)] = prefix[static_cast<std::size_t>(i)] + w[i];
  auto mean = [&](Eigen::Index a, Eigen::Index b) {
    return (prefix[static_cast<std::size_t>(b + 1)] - prefix[static_cast<std::size_t>(a)]) / static_cast<double>(b - a + 1);
  };
  Vector y(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double outer = INFINITY;
    for (Eigen::Index j = 0; j <= i; ++j) {
      double inner = -INFINITY;
      for (Eigen::Index k = i; k < d; ++k) inner = std::max(inner, mean(j, k));
      outer = std::min(outer, inner);
    }
    y[i] = std::max(outer, 0.0);
  }
  return unsort_with_signs(z, s, y);
}

inline double slope_objective(const Matrix& a, const Vector& b, double sigma, const Vector& lambda,
                              const Vector& beta) {
  return 0.5 * (b - a * beta).squaredNorm() + sigma * sorted_l1(beta, lambda);
}

/// Plain (unaccelerated) proximal gradient with the exact Lipschitz constant
/// from a dense eigendecomposition and the min-max prox. Runs until the
/// iterate stops moving.
inline Vector slope_ista(const Matrix& a, const Vector& b, double sigma, const Vector& lambda,
                         int max_iter = 200000) {
  const Matrix g = a.transpose() * a;
  const Vector c = a.transpose() * b;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
  const double lip = std::max(eig.eigenvalues().maxCoeff(), 1e-12);
  Vector x = Vector::Zero(a.cols());
  for (int it = 0; it < max_iter; ++it) {
    const Vector next = prox_maxmin(x - (g * x - c) / lip, lambda * (sigma / lip));
    const double move = (next - x).lpNorm<Eigen::Infinity>();
    x = next;
    if (move < 1e-15) break;
  }
  return x;
}

/// Random nonincreasing positive weights.
inline Vector random_lambda(std::mt19937_64& rng, Eigen::Index d, double lo = 0.05, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(d));
  for (auto& x : v) x = u(rng);
  std::sort(v.rbegin(), v.rend());
  return Eigen::Map<Vector>(v.data(), d);
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index d, double scale = 3.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = nd(rng);
  return v;
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = nd(rng);
  return m;
}

}  // namespace oracle
