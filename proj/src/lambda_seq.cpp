#include "nsslope/lambda_seq.hpp"

#include <cmath>

namespace nsslope {

namespace {

void check_level(double q, const char* who) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError(std::string(who) + ": level must lie in (0, 1)");
  }
}

}  // namespace

LambdaSequence bh_sequence(Eigen::Index d, double q) {
  if (d < 1) throw DimensionError("bh_sequence: d must be >= 1");
  check_level(q, "bh_sequence");
  Vector values(d);
  for (Eigen::Index i = 1; i <= d; ++i) {
    const double tail = static_cast<double>(i) * q / (2.0 * static_cast<double>(d));
    if (!(tail < 0.5)) {
      throw DomainError("bh_sequence: quantile argument <= 0.5 at index " + std::to_string(i));
    }
    values[i - 1] = normal_quantile(1.0 - tail);
  }
  return LambdaSequence(std::move(values));
}

LambdaSequence adjusted_sequence(Eigen::Index d, double q, Eigen::Index n) {
  if (n < 1) throw DimensionError("adjusted_sequence: n must be >= 1");
  const Vector bh = bh_sequence(d, q).values();
  Vector values(d);
  values[0] = bh[0];
  double sum_sq = values[0] * values[0];
  Eigen::Index i = 1;  // zero-based; the one-based index is i + 1
  for (; i < d; ++i) {
    const auto divisor = static_cast<double>(n - (i + 1));
    if (divisor <= 0.0) break;
    const double next = bh[i] * std::sqrt(1.0 + sum_sq / divisor);
    if (next > values[i - 1]) break;
    values[i] = next;
    sum_sq += next * next;
  }
  for (; i < d; ++i) values[i] = values[i - 1];
  return LambdaSequence(std::move(values));
}

LambdaSequence fwer_uniform_sequence(Eigen::Index d, double alpha, Eigen::Index p) {
  if (d < 1 || p < 1) throw DimensionError("fwer_uniform_sequence: sizes must be >= 1");
  check_level(alpha, "fwer_uniform_sequence");
  return LambdaSequence::uniform(d, normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(p))));
}

}  // namespace nsslope
