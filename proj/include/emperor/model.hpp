#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace emperor {

/// An N x d matrix of samples, the empirical measure being described.
/// Validated at construction: N >= 1, d >= 1, all entries finite.
class PointSet {
 public:
  explicit PointSet(Eigen::MatrixXd points);

  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dimension() const { return points_.cols(); }

 private:
  Eigen::MatrixXd points_;
};

/// Builds a PointSet from row vectors. Rejects empty input, ragged rows and
/// non-finite entries.
PointSet pointset_from_rows(const std::vector<std::vector<double>>& rows);

/// A K-component Gaussian mixture sum_j pi_j N(mu_j, Sigma_j) on R^d.
///
/// Construction validates: weights positive and summing to one (inputs within
/// 1e-12 of one are renormalized exactly), covariances symmetric positive
/// definite (Cholesky succeeds, no tolerance). A diagonal jitter of
/// 1e-10 * trace / d can be requested explicitly; it is never applied
/// silently.
class MultivariateGMM {
 public:
  MultivariateGMM(Eigen::VectorXd weights, std::vector<Eigen::VectorXd> means,
                  std::vector<Eigen::MatrixXd> covariances,
                  bool apply_jitter = false);

  int components() const { return static_cast<int>(weights_.size()); }
  int dimension() const { return static_cast<int>(means_.front().size()); }

  const Eigen::VectorXd& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& means() const { return means_; }
  const std::vector<Eigen::MatrixXd>& covariances() const { return covariances_; }

 private:
  Eigen::VectorXd weights_;
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::MatrixXd> covariances_;
};

/// Free-function alias for the validating constructor.
MultivariateGMM validate_gmm(const Eigen::VectorXd& weights,
                             const std::vector<Eigen::VectorXd>& means,
                             const std::vector<Eigen::MatrixXd>& covariances,
                             bool apply_jitter = false);

/// One slice's K-component univariate mixture. Weights positive and summing
/// to one (renormalized within 1e-12), stddevs strictly positive. The
/// canonical descriptor form additionally has components sorted ascending by
/// mean; see sort_components in gmm1d.hpp.
class UnivariateGMM {
 public:
  UnivariateGMM(Eigen::VectorXd weights, Eigen::VectorXd means,
                Eigen::VectorXd stddevs);

  int components() const { return static_cast<int>(weights_.size()); }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& means() const { return means_; }
  const Eigen::VectorXd& stddevs() const { return stddevs_; }

 private:
  Eigen::VectorXd weights_;
  Eigen::VectorXd means_;
  Eigen::VectorXd stddevs_;
};

/// Draws n i.i.d. samples. The component is chosen by inverse CDF on the
/// weights, the Gaussian by applying the Cholesky factor of Sigma_j to
/// standard normals. Fully deterministic given the seed.
PointSet sample_gmm(const MultivariateGMM& gmm, Eigen::Index n, std::uint64_t seed);

}  // namespace emperor
