#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "emperor/model.hpp"

namespace emperor {

enum class DirectionScheme {
  /// i.i.d. standard normal vectors, normalized: uniform on the sphere.
  IidGaussianNormalized,
  /// e_1 ... e_min(d,L) first, then uniform draws. Axis slices make marginal
  /// moments directly readable, which helps debugging; not part of the
  /// default pipeline.
  AxisAlignedThenRandom,
};

/// L unit directions on S^{d-1}, with the seed and scheme that produced them
/// so any descriptor is reproducible.
struct SliceSet {
  Eigen::MatrixXd directions;  // L x d, unit rows
  std::uint64_t seed = 0;
  DirectionScheme scheme = DirectionScheme::IidGaussianNormalized;

  Eigen::Index count() const { return directions.rows(); }
  Eigen::Index dimension() const { return directions.cols(); }
};

/// Draws L directions. Slice l uses the substream mix_seed(seed, l), so the
/// result is independent of evaluation order and parallel schedule.
/// Antipodal pairs are kept: for odd k, theta and -theta carry distinct
/// sliced moments.
SliceSet generate_directions(int d, int L, std::uint64_t seed,
                             DirectionScheme scheme = DirectionScheme::IidGaussianNormalized);

/// Projects every point onto the unit direction: y_i = <x_i, theta>.
Eigen::VectorXd project(const PointSet& points,
                        const Eigen::Ref<const Eigen::VectorXd>& theta);

/// How far the mixture is from a component collision in the slice theta:
/// min over pairs j < j' of max(|theta'(mu_j - mu_j')|,
/// |theta'(Sigma_j - Sigma_j')theta|). Zero means two components project to
/// the same univariate Gaussian. For a single component the score is
/// undefined and +infinity is returned by convention.
double collision_score(const MultivariateGMM& gmm,
                       const Eigen::Ref<const Eigen::VectorXd>& theta);

}  // namespace emperor
