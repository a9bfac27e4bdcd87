#include "emperor/reconstruct.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "emperor/errors.hpp"
#include "emperor/parallel.hpp"
#include "emperor/rng.hpp"

namespace emperor {

namespace {

constexpr double kRankTolerance = 1e-10;

double monomial_power(const Eigen::VectorXd& theta, const MultiIndex& alpha) {
  double value = 1.0;
  for (int i = 0; i < alpha.dimension(); ++i) {
    const int e = alpha.exponents[static_cast<std::size_t>(i)];
    if (e == 0) continue;
    value *= std::pow(theta[i], e);
  }
  return value;
}

// Separate substream tags for directions and noise so the two draws of a
// trial never overlap.
constexpr std::uint64_t kDirectionTag = 1;
constexpr std::uint64_t kNoiseTag = 2;

struct SlopeFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> residuals;
  double residual_std = 0.0;
};

SlopeFit fit_line_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  SlopeFit fit;
  const std::size_t n = x.size();
  if (n < 2) return fit;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  const double intercept = my - fit.slope * mx;
  fit.residuals.resize(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = y[i] - (intercept + fit.slope * x[i]);
    ss += fit.residuals[i] * fit.residuals[i];
  }
  fit.residual_std =
      n > 2 ? std::sqrt(ss / static_cast<double>(n - 2)) : 0.0;
  return fit;
}

}  // namespace

DesignMatrix design_matrix(const SliceSet& slices, int degree) {
  if (degree < 0) {
    fail(ErrorCode::InvalidArgument, "design degree must be >= 0");
  }
  const int d = static_cast<int>(slices.dimension());
  MonomialBasis basis = enumerate_multi_indices(d, degree);
  const Eigen::Index rows = slices.count();
  const auto cols = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd entries(rows, cols);
  std::vector<double> coeff(basis.indices.size());
  for (std::size_t a = 0; a < basis.indices.size(); ++a) {
    coeff[a] = static_cast<double>(
        multinomial_coefficient(degree, basis.indices[a]));
  }
  for (Eigen::Index l = 0; l < rows; ++l) {
    const Eigen::VectorXd theta = slices.directions.row(l).transpose();
    for (Eigen::Index a = 0; a < cols; ++a) {
      entries(l, a) =
          coeff[static_cast<std::size_t>(a)] *
          monomial_power(theta, basis.indices[static_cast<std::size_t>(a)]);
    }
  }
  return DesignMatrix{std::move(entries), degree, std::move(basis), slices};
}

Eigen::VectorXd sliced_moments_from_descriptor(const Descriptor& descriptor,
                                               int degree) {
  if (degree < 0) {
    fail(ErrorCode::InvalidArgument, "moment degree must be >= 0");
  }
  Eigen::VectorXd out(descriptor.slice_count());
  for (int l = 0; l < descriptor.slice_count(); ++l) {
    out[l] = univariate_gmm_moment(
        descriptor.per_slice[static_cast<std::size_t>(l)].gmm, degree);
  }
  return out;
}

SolveResult solve_moments(const DesignMatrix& design,
                          const Eigen::VectorXd& observed, double ridge) {
  const Eigen::Index rows = design.entries.rows();
  const auto cols = design.entries.cols();
  if (observed.size() != rows) {
    fail(ErrorCode::DimensionMismatch,
         "observed vector has " + std::to_string(observed.size()) +
             " entries for a design with " + std::to_string(rows) +
             " slices");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    fail(ErrorCode::InvalidArgument, "ridge must be finite and >= 0");
  }

  Eigen::VectorXd solution;
  if (ridge == 0.0) {
    if (rows < cols) {
      fail(ErrorCode::RankDeficient,
           "plain least squares needs at least " + std::to_string(cols) +
               " slices for degree " + std::to_string(design.degree) +
               ", got " + std::to_string(rows) +
               " (use ridge > 0 to proceed anyway)");
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(
        design.entries, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[sv.size() - 1] < kRankTolerance * sv[0]) {
      fail(ErrorCode::RankDeficient,
           "design is numerically rank deficient (smallest singular value " +
               std::to_string(sv.size() ? sv[sv.size() - 1] : 0.0) +
               "); add slices or use ridge > 0");
    }
    solution = svd.solve(observed);
  } else {
    // Augmented formulation [A; sqrt(ridge) I] m = [y; 0].
    const double root = std::sqrt(ridge);
    Eigen::MatrixXd aug(rows + cols, cols);
    aug.topRows(rows) = design.entries;
    aug.bottomRows(cols) =
        root * Eigen::MatrixXd::Identity(cols, cols);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows + cols);
    rhs.head(rows) = observed;
    solution = aug.householderQr().solve(rhs);
  }

  const double residual = (design.entries * solution - observed).norm();
  return SolveResult{
      MomentVector{design.degree, design.basis, std::move(solution)},
      residual};
}

double default_ridge(const DesignMatrix& design) {
  const auto cols = design.entries.cols();
  if (design.entries.rows() >= 2 * cols) return 0.0;
  return 1e-8 * design.entries.squaredNorm() / static_cast<double>(cols);
}

SolveResult recover_moments(const Descriptor& descriptor, int degree,
                            std::optional<double> ridge) {
  DesignMatrix design = design_matrix(descriptor.slices, degree);
  Eigen::VectorXd observed =
      sliced_moments_from_descriptor(descriptor, degree);
  const double lambda = ridge ? *ridge : default_ridge(design);
  return solve_moments(design, observed, lambda);
}

DesignDiagnostics design_diagnostics(const DesignMatrix& design) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(design.entries);
  const auto& sv = svd.singularValues();
  DesignDiagnostics out;
  if (sv.size() == 0) return out;
  out.sigma_max = sv[0];
  out.sigma_min = sv[sv.size() - 1];
  out.condition = out.sigma_min > 0.0
                      ? out.sigma_max / out.sigma_min
                      : std::numeric_limits<double>::infinity();
  return out;
}

RateStudyResult rate_study(const RateStudyConfig& config, int threads) {
  if (config.degree < 0) {
    fail(ErrorCode::InvalidArgument, "rate study degree must be >= 0");
  }
  if (config.slice_counts.empty()) {
    fail(ErrorCode::InvalidArgument, "rate study needs slice counts");
  }
  for (std::size_t i = 0; i < config.slice_counts.size(); ++i) {
    if (config.slice_counts[i] < 1) {
      fail(ErrorCode::InvalidArgument, "slice counts must be >= 1");
    }
    if (i > 0 && config.slice_counts[i] <= config.slice_counts[i - 1]) {
      fail(ErrorCode::InvalidArgument,
           "slice counts must be strictly increasing");
    }
  }
  if (config.trials < 1) {
    fail(ErrorCode::InvalidArgument, "rate study needs at least one trial");
  }
  if (!(config.noise_scale >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "noise scale must be >= 0");
  }
  if (!(config.sample_size >= 1.0)) {
    fail(ErrorCode::InvalidArgument, "sample size must be >= 1");
  }
  if (!(config.ridge >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "ridge must be >= 0");
  }

  const int d = config.gmm.dimension();
  const auto unknowns = static_cast<Eigen::Index>(
      monomial_count(d, config.degree));
  if (config.ridge == 0.0 &&
      config.slice_counts.front() < unknowns) {
    fail(ErrorCode::RankDeficient,
         "smallest slice count " +
             std::to_string(config.slice_counts.front()) +
             " is below the " + std::to_string(unknowns) +
             " unknowns of degree " + std::to_string(config.degree) +
             "; raise it or set ridge > 0");
  }

  MomentVector exact = multivariate_moment_vector(
      config.gmm, config.degree, std::max(6, config.degree));
  const double noise_sd = config.noise_scale / std::sqrt(config.sample_size);

  const std::size_t n_counts = config.slice_counts.size();
  const auto n_trials = static_cast<std::size_t>(config.trials);
  std::vector<RateTrial> cells(n_counts * n_trials);

  parallel_for(n_counts * n_trials, threads, [&](std::size_t key) {
    const std::size_t i = key / n_trials;
    const int t = static_cast<int>(key % n_trials);
    const int L = config.slice_counts[i];
    const std::uint64_t dir_seed =
        mix_seed(mix_seed(config.seed, kDirectionTag), key);
    const std::uint64_t noise_seed =
        mix_seed(mix_seed(config.seed, kNoiseTag), key);

    SliceSet slices = generate_directions(d, L, dir_seed);
    DesignMatrix design = design_matrix(slices, config.degree);
    Eigen::VectorXd y(L);
    for (int l = 0; l < L; ++l) {
      y[l] = sliced_gmm_moment(config.gmm,
                               slices.directions.row(l).transpose(),
                               config.degree);
    }
    if (noise_sd > 0.0) {
      Rng rng(noise_seed);
      for (int l = 0; l < L; ++l) y[l] += noise_sd * rng.normal();
    }
    SolveResult solved = solve_moments(design, y, config.ridge);
    cells[key] =
        RateTrial{L, t, (solved.moments.values - exact.values).norm()};
  });

  RateStudyResult result;
  result.trials = std::move(cells);
  result.table.reserve(n_counts);
  for (std::size_t i = 0; i < n_counts; ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < n_trials; ++t) {
      sum += result.trials[i * n_trials + t].rmse;
    }
    const double mean = sum / static_cast<double>(n_trials);
    double ss = 0.0;
    for (std::size_t t = 0; t < n_trials; ++t) {
      const double dlt = result.trials[i * n_trials + t].rmse - mean;
      ss += dlt * dlt;
    }
    const double sd =
        n_trials > 1 ? std::sqrt(ss / static_cast<double>(n_trials - 1))
                     : 0.0;
    result.table.push_back(RateTableRow{config.slice_counts[i], mean, sd});
  }

  // Slope of log(mean error) vs log(L), with a one-shot exclusion of the
  // smallest count when it clearly sits off the asymptotic line.
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& row : result.table) {
    if (row.rmse_mean > 0.0 && std::isfinite(row.rmse_mean)) {
      lx.push_back(std::log(static_cast<double>(row.slice_count)));
      ly.push_back(std::log(row.rmse_mean));
    }
  }
  SlopeFit fit = fit_line_slope(lx, ly);
  result.fitted_log_slope = fit.slope;
  if (lx.size() >= 3 && fit.residual_std > 0.0 &&
      std::abs(fit.residuals.front()) > 3.0 * fit.residual_std) {
    std::vector<double> lx2(lx.begin() + 1, lx.end());
    std::vector<double> ly2(ly.begin() + 1, ly.end());
    result.fitted_log_slope = fit_line_slope(lx2, ly2).slope;
    result.smallest_excluded = true;
  }

  // Conditioning diagnostic at the largest slice count, first trial's seed.
  {
    const std::size_t key = (n_counts - 1) * n_trials;
    const std::uint64_t dir_seed =
        mix_seed(mix_seed(config.seed, kDirectionTag), key);
    SliceSet slices =
        generate_directions(d, config.slice_counts.back(), dir_seed);
    DesignMatrix design = design_matrix(slices, config.degree);
    Eigen::MatrixXd gram = design.entries.transpose() * design.entries /
                           static_cast<double>(design.entries.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    result.design_lambda_min = eig.eigenvalues().minCoeff();
  }

  return result;
}

}  // namespace emperor
