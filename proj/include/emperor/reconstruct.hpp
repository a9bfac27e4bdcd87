#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "emperor/descriptor.hpp"
#include "emperor/model.hpp"
#include "emperor/momentindex.hpp"
#include "emperor/moments.hpp"
#include "emperor/slicing.hpp"

namespace emperor {

/// Linear map from degree-k multivariate moments to sliced moments: row l,
/// column alpha holds multinomial(k, alpha) * theta_l^alpha. Shape is
/// slices x monomial_count(d, k).
struct DesignMatrix {
  Eigen::MatrixXd entries;
  int degree = 0;
  MonomialBasis basis;
  SliceSet slices;
};

DesignMatrix design_matrix(const SliceSet& slices, int degree);

/// Degree-k raw moment of each slice's fitted mixture, in slice order.
Eigen::VectorXd sliced_moments_from_descriptor(const Descriptor& descriptor,
                                               int degree);

struct SolveResult {
  MomentVector moments;
  /// Euclidean norm of (design * solution - observed).
  double residual_norm = 0.0;
};

/// Solves design * m = observed in least squares. With ridge == 0 this is the
/// plain LS solution via SVD and requires at least as many slices as
/// unknowns; a numerically rank-deficient design (smallest singular value
/// below 1e-10 of the largest) is an error rather than a silent pseudo-
/// inverse. With ridge > 0 the Tikhonov-regularized system is solved through
/// the augmented QR formulation, which tolerates rank deficiency.
SolveResult solve_moments(const DesignMatrix& design,
                          const Eigen::VectorXd& observed, double ridge);

/// Automatic regularization rule: no ridge when the design is comfortably
/// overdetermined (slices >= 2x unknowns), otherwise a small multiple of the
/// mean squared column energy, 1e-8 * ||design||_F^2 / unknowns.
double default_ridge(const DesignMatrix& design);

/// Fitted-slice moments -> design -> least squares, end to end. When `ridge`
/// is not given, `default_ridge` decides.
SolveResult recover_moments(const Descriptor& descriptor, int degree,
                            std::optional<double> ridge = std::nullopt);

struct DesignDiagnostics {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double condition = 0.0;  // sigma_max / sigma_min (inf when singular)
};

DesignDiagnostics design_diagnostics(const DesignMatrix& design);

/// Monte Carlo study of recovery error against the number of slices. Each
/// (slice count, trial) cell draws fresh directions, computes the exact
/// sliced moments of `gmm`, perturbs them with iid Gaussian noise of
/// standard deviation noise_scale / sqrt(sample_size), solves, and records
/// the Euclidean error against the exact moment vector.
struct RateStudyConfig {
  MultivariateGMM gmm;
  int degree = 2;
  std::vector<int> slice_counts;
  int trials = 50;
  double noise_scale = 1.0;
  double sample_size = 100.0;
  double ridge = 0.0;
  std::uint64_t seed = 0;
};

struct RateTrial {
  int slice_count = 0;
  int trial = 0;
  double rmse = 0.0;
};

struct RateTableRow {
  int slice_count = 0;
  double rmse_mean = 0.0;
  double rmse_std = 0.0;
};

struct RateStudyResult {
  std::vector<RateTrial> trials;
  std::vector<RateTableRow> table;
  /// OLS slope of log(rmse_mean) against log(slice count).
  double fitted_log_slope = 0.0;
  /// True when the smallest slice count was dropped from the slope fit
  /// because its residual exceeded three residual standard deviations
  /// (preasymptotic bend).
  bool smallest_excluded = false;
  /// Smallest eigenvalue of (1/L) design^T design at the largest slice
  /// count, a conditioning health check.
  double design_lambda_min = 0.0;
};

RateStudyResult rate_study(const RateStudyConfig& config, int threads = 1);

}  // namespace emperor
