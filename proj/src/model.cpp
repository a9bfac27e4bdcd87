#include "emperor/model.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

#include "emperor/errors.hpp"
#include "emperor/rng.hpp"

namespace emperor {

namespace {

constexpr double kWeightSumTolerance = 1e-12;

void check_weights(Eigen::VectorXd& weights) {
  if (weights.size() < 1) fail(ErrorCode::EmptyInput, "mixture needs at least one component");
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    if (!std::isfinite(weights[j]) || weights[j] <= 0.0) {
      fail(ErrorCode::NonPositiveWeight,
           "weight " + std::to_string(j) + " = " + std::to_string(weights[j]) + " is not positive");
    }
  }
  const double sum = weights.sum();
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    fail(ErrorCode::WeightSum, "weights sum to " + std::to_string(sum) + ", expected 1");
  }
  weights /= sum;
}

}  // namespace

PointSet::PointSet(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() < 1) fail(ErrorCode::EmptyInput, "point set must contain at least one point");
  if (points_.cols() < 1) fail(ErrorCode::InvalidArgument, "point set dimension must be >= 1");
  if (!points_.allFinite()) fail(ErrorCode::NonFiniteEntry, "point set contains a non-finite entry");
}

PointSet pointset_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) fail(ErrorCode::EmptyInput, "no rows given");
  const std::size_t d = rows.front().size();
  if (d == 0) fail(ErrorCode::InvalidArgument, "rows must have at least one coordinate");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      fail(ErrorCode::RaggedRows, "row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                      " entries, expected " + std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(rows[i][j])) {
        fail(ErrorCode::NonFiniteEntry, "row " + std::to_string(i) + " contains a non-finite entry");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return PointSet(std::move(m));
}

MultivariateGMM::MultivariateGMM(Eigen::VectorXd weights,
                                 std::vector<Eigen::VectorXd> means,
                                 std::vector<Eigen::MatrixXd> covariances,
                                 bool apply_jitter)
    : weights_(std::move(weights)), means_(std::move(means)), covariances_(std::move(covariances)) {
  check_weights(weights_);
  const std::size_t k = static_cast<std::size_t>(weights_.size());
  if (means_.size() != k || covariances_.size() != k) {
    fail(ErrorCode::DimensionMismatch, "weights, means and covariances must have equal component counts");
  }
  const Eigen::Index d = means_.front().size();
  if (d < 1) fail(ErrorCode::InvalidArgument, "mixture dimension must be >= 1");

  for (std::size_t j = 0; j < k; ++j) {
    if (means_[j].size() != d) {
      fail(ErrorCode::DimensionMismatch, "mean " + std::to_string(j) + " has wrong dimension");
    }
    if (!means_[j].allFinite()) fail(ErrorCode::NonFiniteEntry, "mean " + std::to_string(j) + " is not finite");
    Eigen::MatrixXd& cov = covariances_[j];
    if (cov.rows() != d || cov.cols() != d) {
      fail(ErrorCode::DimensionMismatch, "covariance " + std::to_string(j) + " has wrong shape");
    }
    if (!cov.allFinite()) fail(ErrorCode::NonFiniteEntry, "covariance " + std::to_string(j) + " is not finite");
    const double scale = cov.cwiseAbs().maxCoeff();
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
      fail(ErrorCode::AsymmetricCovariance, "covariance " + std::to_string(j) + " is not symmetric");
    }
    cov = ((cov + cov.transpose()) / 2.0).eval();
    if (apply_jitter) {
      cov += (1e-10 * cov.trace() / static_cast<double>(d)) *
             Eigen::MatrixXd::Identity(d, d);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      fail(ErrorCode::NonPDCovariance, "covariance " + std::to_string(j) + " is not positive definite");
    }
  }
}

MultivariateGMM validate_gmm(const Eigen::VectorXd& weights,
                             const std::vector<Eigen::VectorXd>& means,
                             const std::vector<Eigen::MatrixXd>& covariances,
                             bool apply_jitter) {
  return MultivariateGMM(weights, means, covariances, apply_jitter);
}

UnivariateGMM::UnivariateGMM(Eigen::VectorXd weights, Eigen::VectorXd means,
                             Eigen::VectorXd stddevs)
    : weights_(std::move(weights)), means_(std::move(means)), stddevs_(std::move(stddevs)) {
  check_weights(weights_);
  const Eigen::Index k = weights_.size();
  if (means_.size() != k || stddevs_.size() != k) {
    fail(ErrorCode::DimensionMismatch, "weights, means and stddevs must have equal lengths");
  }
  if (!means_.allFinite()) fail(ErrorCode::NonFiniteEntry, "means contain a non-finite entry");
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!std::isfinite(stddevs_[j]) || stddevs_[j] <= 0.0) {
      fail(ErrorCode::InvalidArgument,
           "stddev " + std::to_string(j) + " = " + std::to_string(stddevs_[j]) + " is not positive");
    }
  }
}

PointSet sample_gmm(const MultivariateGMM& gmm, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "sample count must be >= 1");
  const int k = gmm.components();
  const Eigen::Index d = gmm.dimension();

  std::vector<Eigen::MatrixXd> factors;
  factors.reserve(k);
  for (int j = 0; j < k; ++j) {
    Eigen::LLT<Eigen::MatrixXd> llt(gmm.covariances()[j]);
    if (llt.info() != Eigen::Success) {
      fail(ErrorCode::NonPDCovariance, "Cholesky failed for covariance " + std::to_string(j));
    }
    factors.push_back(llt.matrixL());
  }

  Eigen::VectorXd cumulative(k);
  double acc = 0.0;
  for (int j = 0; j < k; ++j) {
    acc += gmm.weights()[j];
    cumulative[j] = acc;
  }
  cumulative[k - 1] = 1.0;

  Rng rng(seed);
  Eigen::MatrixXd out(n, d);
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = rng.uniform();
    int j = 0;
    while (j < k - 1 && u >= cumulative[j]) ++j;
    for (Eigen::Index m = 0; m < d; ++m) z[m] = rng.normal();
    out.row(i) = (gmm.means()[j] + factors[j] * z).transpose();
  }
  return PointSet(std::move(out));
}

}  // namespace emperor
