#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace nsslope {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error hierarchy. Everything thrown by the library derives from Error so
// callers (the CLI in particular) can map it to a runtime-error exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct NonFiniteError : Error {
  using Error::Error;
};
struct SingularResidualError : Error {
  using Error::Error;
};
struct NotPositiveDefiniteError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw NonFiniteError(std::string(what) + ": non-finite entry");
}

/// A sample matrix with zero-mean columns and its 1/n sample covariance.
///
/// Built only through center_columns(); immutable afterwards.
class Dataset {
 public:
  [[nodiscard]] Eigen::Index n() const { return x_.rows(); }
  [[nodiscard]] Eigen::Index p() const { return x_.cols(); }
  [[nodiscard]] const Matrix& X() const { return x_; }
  [[nodiscard]] const Matrix& S() const { return s_; }

 private:
  friend Dataset center_columns(const Eigen::Ref<const Matrix>& raw);
  Dataset(Matrix x, Matrix s) : x_(std::move(x)), s_(std::move(s)) {}

  Matrix x_;
  Matrix s_;
};

/// Subtracts column means and forms S = XᵀX / n.
/// Requires n >= 2, p >= 2 and finite entries.
Dataset center_columns(const Eigen::Ref<const Matrix>& raw);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile Φ⁻¹(prob) for prob in (0, 1).
/// Acklam's rational approximation polished by one Halley step against
/// normal_cdf, which brings |Φ(z) - prob| down to round-off.
double normal_quantile(double prob);

}  // namespace nsslope
