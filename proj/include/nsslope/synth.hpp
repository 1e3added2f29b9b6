#pragma once

#include "nsslope/core.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nsslope {

using Edge = std::pair<Eigen::Index, Eigen::Index>;  // first < second

/// Counter-based generator: output k is the SplitMix64 finalizer applied to
/// key + (k + 1)·φ, with the key derived from the seed the same way. Streams
/// are fixed by (seed, counter) alone, so they agree on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed);

  [[nodiscard]] std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on the open interval (0, 1) with 53 random bits.
  [[nodiscard]] double uniform(std::uint64_t counter) const;
  /// Standard normal through the inverse CDF.
  [[nodiscard]] double normal(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

struct GroundTruthModel {
  Matrix sigma;
  Matrix theta;
  std::vector<Edge> edges;
};

/// Validates Σ·Θ = I, Σ positive definite and derives the edge list from
/// |Θ_ij| > edge_tol.
GroundTruthModel make_model(Matrix sigma, Matrix theta, double edge_tol = 1e-10);

/// Block-diagonal precision: diag_value on the diagonal, off_value inside
/// each block. Σ is inverted block by block in closed form.
GroundTruthModel make_block_model(Eigen::Index p, Eigen::Index block_size, double diag_value,
                                  double off_value);

/// Unit-diagonal covariance with hub_value in the first column and the last
/// row, symmetrized as (M + Mᵀ)/2. Θ = Σ⁻¹ by dense inversion.
GroundTruthModel make_hub_model(Eigen::Index p, double hub_value);

/// n rows x = L z with L the lower Cholesky factor of Σ, returned centered.
Dataset sample_mvn(const GroundTruthModel& model, Eigen::Index n, std::uint64_t seed);

enum class Structure { Block, Hub };

Structure parse_structure(const std::string& name);
std::string to_string(Structure s);

struct ExperimentConfig {
  Structure structure = Structure::Block;
  Eigen::Index p = 40;
  Eigen::Index n = 200;
  Eigen::Index block_size = 4;
  double diag_value = 1.0;
  double off_value = 0.3;
  double hub_value = 0.2;
  int repetitions = 25;
  std::uint64_t seed = 1;
  double q = 0.05;
  double alpha = 0.05;

  void validate() const;
  [[nodiscard]] GroundTruthModel make_model() const;
};

}  // namespace nsslope
