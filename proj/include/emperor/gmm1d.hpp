#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "emperor/model.hpp"

namespace emperor {

/// Hyperparameters of the per-slice EM fit. The underlying estimator has no
/// published defaults, so this struct is the single place they live.
struct EMConfig {
  int components = 1;
  int max_iters = 200;
  /// Convergence: |change in mean log-likelihood| < rel_tol * (1 + |mean|).
  double rel_tol = 1e-8;
  int restarts = 5;
  /// Variance floor = variance_floor_scale * sample variance, with absolute
  /// fallback 1e-12 when the sample variance is zero.
  double variance_floor_scale = 1e-6;
  std::uint64_t seed = 0;
};

struct FitReport {
  UnivariateGMM gmm;  // canonical form: components sorted ascending by mean
  double final_loglik = 0.0;
  int iterations = 0;
  int restarts_used = 0;
  bool converged = false;  // true: rel_tol fired; false: max_iters exhausted
  bool floor_hit = false;
  /// Winning restart's trajectory: entry i is the log-likelihood before EM
  /// update i+1, the last entry is the final log-likelihood.
  std::vector<double> loglik_trace;
  /// Iterations after which a starved component was re-seeded. EM ascent is
  /// guaranteed between re-seeds, not across them.
  std::vector<int> reseed_iterations;
};

/// Total log-likelihood sum_i log sum_k pi_k phi(y_i; mu_k, sigma_k),
/// accumulated with log-sum-exp.
double log_likelihood(const Eigen::VectorXd& samples, const UnivariateGMM& gmm);

/// One EM update: E-step responsibilities via log-sum-exp, M-step weighted
/// mean/variance/weight updates with the variance floor. Returns the updated
/// mixture and the log-likelihood of the input mixture (pre-update).
std::pair<UnivariateGMM, double> em_step(const Eigen::VectorXd& samples,
                                         const UnivariateGMM& gmm,
                                         double variance_floor);

/// Canonical component order: ascending mean, ties broken by ascending
/// stddev, then ascending weight. A pure relabeling; the represented density
/// is unchanged.
UnivariateGMM sort_components(const UnivariateGMM& gmm);

/// Fits a K-component mixture by EM with deterministic restarts.
///
/// Samples are sorted before anything else, so the fit is an exact function
/// of the sample multiset (permutation invariant, bitwise). Restart 0 places
/// centers at the (j+0.5)/K quantiles of the sorted samples; the quantile
/// grid is symmetric, so affine maps of the data move the centers with it.
/// Later restarts use k-means++ distance-squared seeding from per-restart
/// substreams. Every restart takes one Lloyd pass and per-cluster moment
/// matching before EM. The best final log-likelihood wins; ties within 1e-12
/// go to the lowest restart index.
///
/// Identical samples are not an error: all components are placed at the
/// common value with the absolute floor and uniform weights.
FitReport fit_gmm1d(const Eigen::VectorXd& samples, const EMConfig& config);
FitReport fit_gmm1d(const std::vector<double>& samples, const EMConfig& config);

}  // namespace emperor
