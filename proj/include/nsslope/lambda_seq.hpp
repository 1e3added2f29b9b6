#pragma once

#include "nsslope/sorted_l1.hpp"

namespace nsslope {

/// λ_i = Φ⁻¹(1 − i·q / 2d), i = 1..d.
LambdaSequence bh_sequence(Eigen::Index d, double q);

/// BH weights inflated for non-orthogonal designs:
///   λ_i = λ_i^BH · sqrt(1 + Σ_{j<i} λ_j² / (n − i)),
/// where the λ_j in the sum are the already-adjusted values. The recursion
/// stops at the first increase, or when n − i ≤ 0, and the remaining
/// entries are held at the last accepted value.
LambdaSequence adjusted_sequence(Eigen::Index d, double q, Eigen::Index n);

/// Single-level weights Φ⁻¹(1 − α / 2p) repeated d times: the ℓ1 baseline.
LambdaSequence fwer_uniform_sequence(Eigen::Index d, double alpha, Eigen::Index p);

}  // namespace nsslope
