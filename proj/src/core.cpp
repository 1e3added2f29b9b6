#include "nsslope/core.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace nsslope {

Dataset center_columns(const Eigen::Ref<const Matrix>& raw) {
  if (raw.rows() < 2 || raw.cols() < 2) {
    throw DimensionError("center_columns: need n >= 2 and p >= 2, got " +
                         std::to_string(raw.rows()) + "x" +
                         std::to_string(raw.cols()));
  }
  require_finite(raw, "center_columns");

  Matrix x = raw;
  x.rowwise() -= x.colwise().mean();
  Matrix s = (x.transpose() * x) / static_cast<double>(x.rows());
  // The product is symmetric in exact arithmetic; make it so bitwise.
  s = (0.5 * (s + s.transpose())).eval();
  return Dataset(std::move(x), std::move(s));
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

namespace {

// Acklam's coefficients, relative error ~1.15e-9 before refinement.
constexpr std::array<double, 6> kA{-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
constexpr std::array<double, 5> kB{-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
constexpr std::array<double, 6> kC{-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
constexpr std::array<double, 4> kD{7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
constexpr double kLow = 0.02425;

double acklam(double prob) {
  if (prob < kLow) {
    const double q = std::sqrt(-2.0 * std::log(prob));
    return (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
           ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
  }
  if (prob > 1.0 - kLow) {
    const double q = std::sqrt(-2.0 * std::log1p(-prob));
    return -(((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
           ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
  }
  const double q = prob - 0.5;
  const double r = q * q;
  return (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r + kA[5]) * q /
         (((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw DomainError("normal_quantile: probability must lie in (0, 1)");
  }
  if (prob == 0.5) return 0.0;
  // Work in the lower tail so the CDF residual keeps full relative precision,
  // then mirror; this also makes the function exactly antisymmetric.
  const bool upper = prob > 0.5;
  const double tail = upper ? 1.0 - prob : prob;
  double z = acklam(tail);
  const double e = normal_cdf(z) - tail;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * z * z);
  z -= u / (1.0 + 0.5 * z * u);
  return upper ? -z : z;
}

}  // namespace nsslope
