#include "nsslope/synth.hpp"

#include <cmath>

namespace nsslope {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed) : key_(splitmix_finalize(seed + kGolden)) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return splitmix_finalize(key_ + (counter + 1) * kGolden);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const {
  return normal_quantile(uniform(counter));
}

GroundTruthModel make_model(Matrix sigma, Matrix theta, double edge_tol) {
  const Eigen::Index p = sigma.rows();
  if (sigma.cols() != p || theta.rows() != p || theta.cols() != p) {
    throw DimensionError("make_model: sigma and theta must be square and the same size");
  }
  require_finite(sigma, "make_model sigma");
  require_finite(theta, "make_model theta");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw NotPositiveDefiniteError("make_model: sigma is not symmetric");
  }
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("make_model: sigma is not positive definite");
  }
  if ((sigma * theta - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() > 1e-8) {
    throw Error("make_model: sigma * theta differs from the identity");
  }
  GroundTruthModel model{std::move(sigma), std::move(theta), {}};
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (std::abs(model.theta(i, j)) > edge_tol) model.edges.emplace_back(i, j);
    }
  }
  return model;
}

GroundTruthModel make_block_model(Eigen::Index p, Eigen::Index block_size, double diag_value,
                                  double off_value) {
  if (block_size < 1 || p < 2 || p % block_size != 0) {
    throw DimensionError("make_block_model: p must be a positive multiple of block_size");
  }
  // A block a·I + b·11ᵀ with a = diag − off, b = off has eigenvalues a and
  // a + k·b, and inverse (1/a)(I − b/(a + k·b)·11ᵀ).
  const double a = diag_value - off_value;
  const double b = off_value;
  const auto k = static_cast<double>(block_size);
  if (!(a > 0.0) || !(a + k * b > 0.0)) {
    throw NotPositiveDefiniteError("make_block_model: block precision is not positive definite");
  }
  const double inv_off = -b / (a * (a + k * b));
  const double inv_diag = 1.0 / a + inv_off;

  Matrix theta = Matrix::Zero(p, p);
  Matrix sigma = Matrix::Zero(p, p);
  for (Eigen::Index start = 0; start < p; start += block_size) {
    theta.block(start, start, block_size, block_size).setConstant(off_value);
    sigma.block(start, start, block_size, block_size).setConstant(inv_off);
    for (Eigen::Index i = start; i < start + block_size; ++i) {
      theta(i, i) = diag_value;
      sigma(i, i) = inv_diag;
    }
  }
  return make_model(std::move(sigma), std::move(theta));
}

GroundTruthModel make_hub_model(Eigen::Index p, double hub_value) {
  if (p < 2) throw DimensionError("make_hub_model: p must be >= 2");
  Matrix m = Matrix::Identity(p, p);
  for (Eigen::Index i = 1; i < p; ++i) m(i, 0) = hub_value;
  for (Eigen::Index j = 0; j < p - 1; ++j) m(p - 1, j) = hub_value;
  Matrix sigma = 0.5 * (m + m.transpose());
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("make_hub_model: covariance is not positive definite");
  }
  Matrix theta = llt.solve(Matrix::Identity(p, p));
  theta = (0.5 * (theta + theta.transpose())).eval();
  return make_model(std::move(sigma), std::move(theta));
}

Dataset sample_mvn(const GroundTruthModel& model, Eigen::Index n, std::uint64_t seed) {
  if (n < 2) throw DimensionError("sample_mvn: n must be >= 2");
  const Eigen::Index p = model.sigma.rows();
  Eigen::LLT<Matrix> llt(model.sigma);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("sample_mvn: covariance is not positive definite");
  }
  const Matrix lower = llt.matrixL();
  const CounterRng rng(seed);
  Matrix z(n, p);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < p; ++c) {
      z(r, c) = rng.normal(static_cast<std::uint64_t>(r * p + c));
    }
  }
  const Matrix x = z * lower.transpose();
  return center_columns(x);
}

Structure parse_structure(const std::string& name) {
  if (name == "block") return Structure::Block;
  if (name == "hub") return Structure::Hub;
  throw DomainError("unknown structure '" + name + "' (expected block or hub)");
}

std::string to_string(Structure s) { return s == Structure::Block ? "block" : "hub"; }

void ExperimentConfig::validate() const {
  if (p < 2) throw DimensionError("ExperimentConfig: p must be >= 2");
  if (n < 2) throw DimensionError("ExperimentConfig: n must be >= 2");
  if (structure == Structure::Block && (block_size < 1 || p % block_size != 0)) {
    throw DimensionError("ExperimentConfig: p must be divisible by block_size");
  }
  if (repetitions < 1) throw DomainError("ExperimentConfig: repetitions must be >= 1");
  if (!(q > 0.0 && q < 1.0) || !(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("ExperimentConfig: q and alpha must lie in (0, 1)");
  }
}

GroundTruthModel ExperimentConfig::make_model() const {
  validate();
  return structure == Structure::Block ? make_block_model(p, block_size, diag_value, off_value)
                                       : make_hub_model(p, hub_value);
}

}  // namespace nsslope
