#include "emperor/moments.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "emperor/errors.hpp"

namespace emperor {

namespace {

constexpr double kUnitNormTolerance = 1e-10;

void check_unit(const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (std::abs(theta.norm() - 1.0) > kUnitNormTolerance) {
    fail(ErrorCode::NonUnitDirection,
         "direction norm " + std::to_string(theta.norm()) + " is not 1");
  }
}

// Sum over pair partitions of the index multiset: each index i appears
// exponents[i] times. Recursion pairs the first remaining element with every
// other one and multiplies by the covariance entry.
double pairings_sum(const std::vector<int>& slots, const Eigen::MatrixXd& cov) {
  if (slots.empty()) return 1.0;
  double total = 0.0;
  const int a = slots.front();
  for (std::size_t i = 1; i < slots.size(); ++i) {
    std::vector<int> rest;
    rest.reserve(slots.size() - 2);
    for (std::size_t j = 1; j < slots.size(); ++j) {
      if (j != i) rest.push_back(slots[j]);
    }
    total += cov(a, slots[i]) * pairings_sum(rest, cov);
  }
  return total;
}

// E[Z^beta] for Z ~ N(0, cov).
double central_gaussian_moment(const Eigen::MatrixXd& cov, const std::vector<int>& beta) {
  int total_degree = 0;
  for (int b : beta) total_degree += b;
  if (total_degree == 0) return 1.0;
  if (total_degree % 2 != 0) return 0.0;

  std::vector<int> slots;
  slots.reserve(total_degree);
  for (std::size_t i = 0; i < beta.size(); ++i) {
    for (int r = 0; r < beta[i]; ++r) slots.push_back(static_cast<int>(i));
  }
  return pairings_sum(slots, cov);
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// E[X^alpha] for X ~ N(mu, cov), via the shift X = mu + Z and a binomial
// expansion over beta <= alpha (componentwise).
double component_moment(const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov,
                        const std::vector<int>& alpha) {
  const std::size_t d = alpha.size();
  std::vector<int> beta(d, 0);
  double total = 0.0;
  while (true) {
    int beta_degree = 0;
    for (int b : beta) beta_degree += b;
    if (beta_degree % 2 == 0) {
      double coeff = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        coeff *= binomial(alpha[i], beta[i]) *
                 std::pow(mu[static_cast<Eigen::Index>(i)], alpha[i] - beta[i]);
      }
      if (coeff != 0.0) total += coeff * central_gaussian_moment(cov, beta);
    }
    // odometer over 0 <= beta_i <= alpha_i
    std::size_t pos = 0;
    while (pos < d && beta[pos] == alpha[pos]) {
      beta[pos] = 0;
      ++pos;
    }
    if (pos == d) break;
    ++beta[pos];
  }
  return total;
}

}  // namespace

double gaussian_raw_moment(double mu, double sigma, int n) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "moment order must be >= 0");
  if (!(sigma > 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be positive");
  double total = 0.0;
  for (int k = 0; 2 * k <= n; ++k) {
    double double_factorial = 1.0;  // (2k-1)!!, with (-1)!! = 1
    for (int j = 2 * k - 1; j >= 1; j -= 2) double_factorial *= static_cast<double>(j);
    total += binomial(n, 2 * k) * double_factorial * std::pow(sigma, 2 * k) *
             std::pow(mu, n - 2 * k);
  }
  return total;
}

double univariate_gmm_moment(const UnivariateGMM& gmm, int n) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "moment order must be >= 0");
  double total = 0.0;
  for (int j = 0; j < gmm.components(); ++j) {
    total += gmm.weights()[j] * gaussian_raw_moment(gmm.means()[j], gmm.stddevs()[j], n);
  }
  return total;
}

double sliced_gmm_moment(const MultivariateGMM& gmm,
                         const Eigen::Ref<const Eigen::VectorXd>& theta, int k) {
  if (k < 0) fail(ErrorCode::InvalidArgument, "moment order must be >= 0");
  if (theta.size() != gmm.dimension()) {
    fail(ErrorCode::DimensionMismatch, "direction dimension does not match the mixture");
  }
  check_unit(theta);
  const int n_comp = gmm.components();
  Eigen::VectorXd means(n_comp), stddevs(n_comp);
  for (int j = 0; j < n_comp; ++j) {
    means[j] = theta.dot(gmm.means()[j]);
    stddevs[j] = std::sqrt(theta.dot(gmm.covariances()[j] * theta));
  }
  UnivariateGMM slice(gmm.weights(), std::move(means), std::move(stddevs));
  return univariate_gmm_moment(slice, k);
}

double multivariate_gmm_moment(const MultivariateGMM& gmm, const MultiIndex& alpha,
                               int degree_cap) {
  if (alpha.dimension() != gmm.dimension()) {
    fail(ErrorCode::DimensionMismatch, "multi-index dimension does not match the mixture");
  }
  for (int a : alpha.exponents) {
    if (a < 0) fail(ErrorCode::InvalidArgument, "multi-index entries must be >= 0");
  }
  if (alpha.degree() > degree_cap) {
    fail(ErrorCode::DegreeCapExceeded,
         "|alpha| = " + std::to_string(alpha.degree()) + " exceeds the degree cap " +
             std::to_string(degree_cap));
  }
  double total = 0.0;
  for (int j = 0; j < gmm.components(); ++j) {
    total += gmm.weights()[j] *
             component_moment(gmm.means()[j], gmm.covariances()[j], alpha.exponents);
  }
  return total;
}

MomentVector multivariate_moment_vector(const MultivariateGMM& gmm, int k, int degree_cap) {
  MomentVector out;
  out.degree = k;
  out.basis = enumerate_multi_indices(gmm.dimension(), k);
  out.values.resize(static_cast<Eigen::Index>(out.basis.size()));
  for (std::size_t i = 0; i < out.basis.size(); ++i) {
    out.values[static_cast<Eigen::Index>(i)] =
        multivariate_gmm_moment(gmm, out.basis.indices[i], degree_cap);
  }
  return out;
}

double empirical_moment(const PointSet& points, const MultiIndex& alpha) {
  if (alpha.dimension() != points.dimension()) {
    fail(ErrorCode::DimensionMismatch, "multi-index dimension does not match the point set");
  }
  const Eigen::MatrixXd& x = points.points();
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double term = 1.0;
    for (Eigen::Index m = 0; m < x.cols(); ++m) {
      const int a = alpha.exponents[static_cast<std::size_t>(m)];
      if (a != 0) term *= std::pow(x(i, m), a);
    }
    total += term;
  }
  return total / static_cast<double>(x.rows());
}

HankelReport hankel_psd_check(const MomentSequence& moments, int n) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "Hankel order must be >= 0");
  if (moments.values.size() < static_cast<std::size_t>(2 * n + 1)) {
    fail(ErrorCode::InsufficientMoments,
         "need " + std::to_string(2 * n + 1) + " moments for H_" + std::to_string(n) + ", got " +
             std::to_string(moments.values.size()));
  }
  Eigen::MatrixXd h(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) h(i, j) = moments.values[static_cast<std::size_t>(i + j)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  const double norm = solver.eigenvalues().cwiseAbs().maxCoeff();
  return HankelReport{min_eig >= -1e-10 * norm, min_eig};
}

MomentSequence univariate_moment_sequence(const UnivariateGMM& gmm, int n) {
  MomentSequence seq;
  seq.values.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) seq.values.push_back(univariate_gmm_moment(gmm, i));
  return seq;
}

double carleman_partial_sum(const std::vector<double>& even_moments, int terms) {
  if (terms < 0) fail(ErrorCode::InvalidArgument, "term count must be >= 0");
  if (even_moments.size() < static_cast<std::size_t>(terms)) {
    fail(ErrorCode::InsufficientMoments, "need " + std::to_string(terms) + " even moments");
  }
  double total = 0.0;
  for (int k = 1; k <= terms; ++k) {
    const double m2k = even_moments[static_cast<std::size_t>(k - 1)];
    if (!(m2k > 0.0)) {
      fail(ErrorCode::NonPositiveEvenMoment,
           "m_" + std::to_string(2 * k) + " = " + std::to_string(m2k) + " must be positive");
    }
    total += std::pow(m2k, -1.0 / (2.0 * k));
  }
  return total;
}

}  // namespace emperor
