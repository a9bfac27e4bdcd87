#include "emperor/slicing.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "emperor/errors.hpp"
#include "emperor/rng.hpp"

namespace emperor {

namespace {

Eigen::RowVectorXd random_unit_row(Rng& rng, int d) {
  Eigen::RowVectorXd v(d);
  double norm = 0.0;
  do {
    for (int m = 0; m < d; ++m) v[m] = rng.normal();
    norm = v.norm();
  } while (norm < 1e-100);
  return v / norm;
}

}  // namespace

SliceSet generate_directions(int d, int L, std::uint64_t seed, DirectionScheme scheme) {
  if (d < 1) fail(ErrorCode::InvalidArgument, "dimension must be >= 1");
  if (L < 1) fail(ErrorCode::InvalidArgument, "slice count must be >= 1");

  SliceSet set;
  set.seed = seed;
  set.scheme = scheme;
  set.directions.resize(L, d);
  for (int l = 0; l < L; ++l) {
    if (scheme == DirectionScheme::AxisAlignedThenRandom && l < d) {
      set.directions.row(l).setZero();
      set.directions(l, l) = 1.0;
      continue;
    }
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(l)));
    set.directions.row(l) = random_unit_row(rng, d);
  }
  return set;
}

Eigen::VectorXd project(const PointSet& points,
                        const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != points.dimension()) {
    fail(ErrorCode::DimensionMismatch,
         "direction dimension " + std::to_string(theta.size()) + " does not match point set dimension " +
             std::to_string(points.dimension()));
  }
  if (std::abs(theta.norm() - 1.0) > 1e-10) {
    fail(ErrorCode::NonUnitDirection, "direction norm " + std::to_string(theta.norm()) + " is not 1");
  }
  return points.points() * theta;
}

double collision_score(const MultivariateGMM& gmm,
                       const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != gmm.dimension()) {
    fail(ErrorCode::DimensionMismatch, "direction dimension does not match the mixture");
  }
  const int k = gmm.components();
  if (k < 2) return std::numeric_limits<double>::infinity();

  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < k; ++j) {
    const double mj = theta.dot(gmm.means()[j]);
    const double vj = theta.dot(gmm.covariances()[j] * theta);
    for (int j2 = j + 1; j2 < k; ++j2) {
      const double dm = std::abs(mj - theta.dot(gmm.means()[j2]));
      const double dv = std::abs(vj - theta.dot(gmm.covariances()[j2] * theta));
      best = std::min(best, std::max(dm, dv));
    }
  }
  return best;
}

}  // namespace emperor
