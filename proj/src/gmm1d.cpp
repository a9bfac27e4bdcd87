#include "emperor/gmm1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "emperor/errors.hpp"
#include "emperor/rng.hpp"

namespace emperor {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2*pi)
constexpr double kAbsVarianceFloor = 1e-12;

// log(pi_k) + log phi(y_i; mu_k, sigma_k) for every sample/component pair.
Eigen::MatrixXd weighted_log_densities(const Eigen::VectorXd& y,
                                       const UnivariateGMM& gmm) {
  const Eigen::Index n = y.size();
  const int k = gmm.components();
  Eigen::MatrixXd out(n, k);
  for (int j = 0; j < k; ++j) {
    const double mu = gmm.means()[j];
    const double sigma = gmm.stddevs()[j];
    const double log_norm =
        std::log(gmm.weights()[j]) - std::log(sigma) - kHalfLog2Pi;
    out.col(j) =
        (-0.5 * ((y.array() - mu) / sigma).square() + log_norm).matrix();
  }
  return out;
}

// Row-wise log-sum-exp of the weighted log densities.
Eigen::ArrayXd row_logsumexp(const Eigen::MatrixXd& logw) {
  Eigen::ArrayXd row_max = logw.rowwise().maxCoeff().array();
  Eigen::ArrayXd sums = (logw.array().colwise() - row_max)
                            .exp()
                            .rowwise()
                            .sum();
  return row_max + sums.log();
}

struct StepDetail {
  Eigen::VectorXd weights;
  Eigen::VectorXd means;
  Eigen::VectorXd stddevs;
  double pre_loglik = 0.0;
  bool floored = false;
  Eigen::VectorXd max_resp;  // per-component max responsibility
};

StepDetail em_step_detail(const Eigen::VectorXd& y, const UnivariateGMM& gmm,
                          double variance_floor) {
  const Eigen::Index n = y.size();
  const int k = gmm.components();
  const Eigen::MatrixXd logw = weighted_log_densities(y, gmm);
  const Eigen::ArrayXd lse = row_logsumexp(logw);

  StepDetail out;
  out.pre_loglik = lse.sum();
  out.weights.resize(k);
  out.means.resize(k);
  out.stddevs.resize(k);
  out.max_resp.resize(k);

  const Eigen::MatrixXd resp = (logw.array().colwise() - lse).exp().matrix();
  for (int j = 0; j < k; ++j) {
    const double nk = resp.col(j).sum();
    // A numerically dead component keeps a vanishing weight; the caller's
    // starvation rule revives it.
    const double denom = std::max(nk, 1e-300);
    const double mu = resp.col(j).dot(y) / denom;
    double var =
        resp.col(j).dot((y.array() - mu).square().matrix()) / denom;
    if (var < variance_floor) {
      var = variance_floor;
      out.floored = true;
    }
    out.weights[j] = std::max(nk, 1e-300) / static_cast<double>(n);
    out.means[j] = mu;
    out.stddevs[j] = std::sqrt(var);
    out.max_resp[j] = resp.col(j).maxCoeff();
  }
  return out;
}

double sorted_quantile(const Eigen::VectorXd& sorted, double q) {
  const Eigen::Index n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const auto lo = static_cast<Eigen::Index>(std::floor(pos));
  if (lo >= n - 1) return sorted[n - 1];
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

// k-means++ style seeding on the sorted samples.
std::vector<double> kmeanspp_centers(const Eigen::VectorXd& y, int k,
                                     Rng& rng) {
  const Eigen::Index n = y.size();
  std::vector<double> centers;
  centers.reserve(static_cast<std::size_t>(k));
  centers.push_back(y[static_cast<Eigen::Index>(
      rng.uniform_index(static_cast<std::uint64_t>(n)))]);
  Eigen::ArrayXd d2 =
      (y.array() - centers.back()).square();
  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum > target) {
          pick = i;
          break;
        }
      }
    } else {
      // All points coincide with an existing center; any pick is equivalent.
      pick = static_cast<Eigen::Index>(
          rng.uniform_index(static_cast<std::uint64_t>(n)));
    }
    centers.push_back(y[pick]);
    d2 = d2.min((y.array() - centers.back()).square());
  }
  return centers;
}

// One Lloyd assignment over sorted samples followed by per-cluster moment
// matching. Centers are sorted first so the assignment reduces to midpoint
// thresholds; a point on a midpoint goes to the lower-index center.
UnivariateGMM initial_mixture(const Eigen::VectorXd& y,
                              std::vector<double> centers, double total_var,
                              double variance_floor) {
  std::sort(centers.begin(), centers.end());
  const int k = static_cast<int>(centers.size());
  const Eigen::Index n = y.size();

  std::vector<double> count(centers.size(), 0.0);
  std::vector<double> sum(centers.size(), 0.0);
  std::vector<double> sumsq(centers.size(), 0.0);
  int cluster = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    while (cluster + 1 < k &&
           y[i] > 0.5 * (centers[cluster] + centers[cluster + 1])) {
      ++cluster;
    }
    count[cluster] += 1.0;
    sum[cluster] += y[i];
    sumsq[cluster] += y[i] * y[i];
  }

  Eigen::VectorXd weights(k);
  Eigen::VectorXd means(k);
  Eigen::VectorXd stddevs(k);
  double weight_total = 0.0;
  for (int j = 0; j < k; ++j) {
    // Empty clusters keep their center and a virtual unit mass so every
    // component enters EM alive.
    weights[j] = std::max(count[j], 1.0);
    weight_total += weights[j];
    if (count[j] >= 2.0) {
      means[j] = sum[j] / count[j];
      double var = sumsq[j] / count[j] - means[j] * means[j];
      var = std::max(var, variance_floor);
      stddevs[j] = std::sqrt(var);
    } else {
      // Empty or singleton cluster: spread it over the whole sample so it
      // can still claim mass in the first E-step.
      means[j] = count[j] == 1.0 ? sum[j] : centers[j];
      stddevs[j] = std::sqrt(std::max(total_var, variance_floor));
    }
  }
  weights /= weight_total;
  return UnivariateGMM(weights, means, stddevs);
}

struct RunResult {
  UnivariateGMM gmm;
  double final_loglik;
  int iterations;
  bool converged;
  bool floor_hit;
  std::vector<double> trace;
  std::vector<int> reseeds;
};

RunResult run_em(const Eigen::VectorXd& y, UnivariateGMM gmm,
                 const EMConfig& config, double total_var,
                 double variance_floor) {
  const Eigen::Index n = y.size();
  const int k = gmm.components();
  RunResult run{std::move(gmm), 0.0, 0, false, false, {}, {}};
  std::vector<bool> reseeded(static_cast<std::size_t>(k), false);
  double prev_mean_ll = std::numeric_limits<double>::quiet_NaN();

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    StepDetail step = em_step_detail(y, run.gmm, variance_floor);
    run.trace.push_back(step.pre_loglik);
    run.floor_hit = run.floor_hit || step.floored;
    run.gmm = UnivariateGMM(step.weights, step.means, step.stddevs);
    run.iterations = iter;

    // Starvation rule: a component whose best responsibility is below 1/N is
    // re-seeded once at the point the mixture explains worst.
    bool did_reseed = false;
    for (int j = 0; j < k; ++j) {
      if (step.max_resp[j] >= 1.0 / static_cast<double>(n) ||
          reseeded[static_cast<std::size_t>(j)]) {
        continue;
      }
      const Eigen::MatrixXd logw = weighted_log_densities(y, run.gmm);
      Eigen::Index worst = 0;
      row_logsumexp(logw).minCoeff(&worst);
      Eigen::VectorXd w = run.gmm.weights();
      Eigen::VectorXd mu = run.gmm.means();
      Eigen::VectorXd sd = run.gmm.stddevs();
      mu[j] = y[worst];
      sd[j] = std::sqrt(std::max(total_var, variance_floor));
      w[j] = 1.0 / static_cast<double>(k);
      w /= w.sum();
      run.gmm = UnivariateGMM(w, mu, sd);
      reseeded[static_cast<std::size_t>(j)] = true;
      did_reseed = true;
    }
    if (did_reseed) run.reseeds.push_back(iter);

    const double mean_ll = step.pre_loglik / static_cast<double>(n);
    if (iter >= 2 && !did_reseed &&
        std::abs(mean_ll - prev_mean_ll) <
            config.rel_tol * (1.0 + std::abs(mean_ll))) {
      run.converged = true;
      break;
    }
    prev_mean_ll = mean_ll;
  }

  run.final_loglik = log_likelihood(y, run.gmm);
  run.trace.push_back(run.final_loglik);
  return run;
}

void validate_config(const EMConfig& config) {
  if (config.components < 1) {
    fail(ErrorCode::InvalidArgument, "EM components must be >= 1");
  }
  if (config.max_iters < 1) {
    fail(ErrorCode::InvalidArgument, "EM max_iters must be >= 1");
  }
  if (!(config.rel_tol > 0.0) || !std::isfinite(config.rel_tol)) {
    fail(ErrorCode::InvalidArgument, "EM rel_tol must be positive");
  }
  if (config.restarts < 1) {
    fail(ErrorCode::InvalidArgument, "EM restarts must be >= 1");
  }
  if (!(config.variance_floor_scale > 0.0)) {
    fail(ErrorCode::InvalidArgument,
         "EM variance_floor_scale must be positive");
  }
}

}  // namespace

double log_likelihood(const Eigen::VectorXd& samples,
                      const UnivariateGMM& gmm) {
  if (samples.size() == 0) {
    fail(ErrorCode::EmptyInput, "log-likelihood of an empty sample");
  }
  return row_logsumexp(weighted_log_densities(samples, gmm)).sum();
}

std::pair<UnivariateGMM, double> em_step(const Eigen::VectorXd& samples,
                                         const UnivariateGMM& gmm,
                                         double variance_floor) {
  if (samples.size() == 0) {
    fail(ErrorCode::EmptyInput, "EM step on an empty sample");
  }
  if (!(variance_floor > 0.0)) {
    fail(ErrorCode::InvalidArgument, "variance floor must be positive");
  }
  StepDetail step = em_step_detail(samples, gmm, variance_floor);
  return {UnivariateGMM(step.weights, step.means, step.stddevs),
          step.pre_loglik};
}

UnivariateGMM sort_components(const UnivariateGMM& gmm) {
  const int k = gmm.components();
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (gmm.means()[a] != gmm.means()[b]) {
      return gmm.means()[a] < gmm.means()[b];
    }
    if (gmm.stddevs()[a] != gmm.stddevs()[b]) {
      return gmm.stddevs()[a] < gmm.stddevs()[b];
    }
    return gmm.weights()[a] < gmm.weights()[b];
  });
  Eigen::VectorXd w(k);
  Eigen::VectorXd mu(k);
  Eigen::VectorXd sd(k);
  for (int j = 0; j < k; ++j) {
    w[j] = gmm.weights()[order[static_cast<std::size_t>(j)]];
    mu[j] = gmm.means()[order[static_cast<std::size_t>(j)]];
    sd[j] = gmm.stddevs()[order[static_cast<std::size_t>(j)]];
  }
  return UnivariateGMM(w, mu, sd);
}

FitReport fit_gmm1d(const Eigen::VectorXd& samples, const EMConfig& config) {
  validate_config(config);
  const Eigen::Index n = samples.size();
  const int k = config.components;
  if (n == 0) fail(ErrorCode::EmptyInput, "cannot fit a mixture to no samples");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(samples[i])) {
      fail(ErrorCode::NonFiniteEntry, "sample " + std::to_string(i) +
                                          " is not finite");
    }
  }
  if (n < k) {
    fail(ErrorCode::TooFewSamples,
         "need at least " + std::to_string(k) + " samples for " +
             std::to_string(k) + " components, got " + std::to_string(n));
  }

  // Sorting first makes the whole fit a function of the sample multiset.
  Eigen::VectorXd y = samples;
  std::sort(y.begin(), y.end());

  const double mean = y.mean();
  const double var = (y.array() - mean).square().mean();

  if (var == 0.0) {
    // Degenerate sample: every point identical. Park all components there.
    const double sd = std::sqrt(kAbsVarianceFloor);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(k, 1.0 / k);
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(k, mean);
    Eigen::VectorXd sdv = Eigen::VectorXd::Constant(k, sd);
    UnivariateGMM gmm(w, mu, sdv);
    FitReport report{gmm, log_likelihood(y, gmm), 0, 0, true, true, {}, {}};
    report.loglik_trace.push_back(report.final_loglik);
    return report;
  }

  const double variance_floor =
      std::max(config.variance_floor_scale * var, kAbsVarianceFloor);

  if (k == 1) {
    const double floored_var = std::max(var, variance_floor);
    Eigen::VectorXd w = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(1, mean);
    Eigen::VectorXd sd = Eigen::VectorXd::Constant(1, std::sqrt(floored_var));
    UnivariateGMM gmm(w, mu, sd);
    FitReport report{gmm,  log_likelihood(y, gmm), 1, 1, true,
                     var < variance_floor, {}, {}};
    report.loglik_trace.push_back(report.final_loglik);
    return report;
  }

  bool have_best = false;
  RunResult best{UnivariateGMM(Eigen::VectorXd::Ones(1),
                               Eigen::VectorXd::Zero(1),
                               Eigen::VectorXd::Ones(1)),
                 0.0, 0, false, false, {}, {}};
  for (int r = 0; r < config.restarts; ++r) {
    std::vector<double> centers;
    if (r == 0) {
      centers.reserve(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) {
        centers.push_back(sorted_quantile(y, (j + 0.5) / k));
      }
    } else {
      Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(r)));
      centers = kmeanspp_centers(y, k, rng);
    }
    UnivariateGMM init = initial_mixture(y, std::move(centers), var,
                                         variance_floor);
    RunResult run = run_em(y, std::move(init), config, var, variance_floor);
    if (!have_best || run.final_loglik > best.final_loglik + 1e-12) {
      best = std::move(run);
      have_best = true;
    }
  }

  FitReport report{sort_components(best.gmm),
                   best.final_loglik,
                   best.iterations,
                   config.restarts,
                   best.converged,
                   best.floor_hit,
                   std::move(best.trace),
                   std::move(best.reseeds)};
  return report;
}

FitReport fit_gmm1d(const std::vector<double>& samples,
                    const EMConfig& config) {
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
      samples.data(), static_cast<Eigen::Index>(samples.size()));
  return fit_gmm1d(y, config);
}

}  // namespace emperor
