// Acceptance gate for the whole pipeline. Every check prints one PASS/FAIL
// line with its runtime and a short measurement; the exit code is the number
// of failures. All tolerances and time budgets are pinned here, next to the
// check they govern.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emperor/bench.hpp"
#include "emperor/descriptor.hpp"
#include "emperor/gmm1d.hpp"
#include "emperor/io.hpp"
#include "emperor/model.hpp"
#include "emperor/momentindex.hpp"
#include "emperor/moments.hpp"
#include "emperor/reconstruct.hpp"
#include "emperor/rng.hpp"
#include "emperor/slicing.hpp"

using namespace emperor;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) { return format_double(v, 3); }

// ---------------------------------------------------------------------------
// Random model generators (fixed seeds; everything below is reproducible).

MultivariateGMM random_mixture(Rng& rng, int dim, int comps) {
  Eigen::VectorXd w(comps);
  for (int j = 0; j < comps; ++j) w[j] = 0.2 + rng.uniform();
  w /= w.sum();
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  for (int j = 0; j < comps; ++j) {
    Eigen::VectorXd mu(dim);
    for (int i = 0; i < dim; ++i) mu[i] = 4.0 * rng.uniform() - 2.0;
    means.push_back(mu);
    Eigen::MatrixXd a(dim, dim);
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) a(r, c) = rng.normal();
    }
    covs.push_back(a * a.transpose() / dim +
                   0.5 * Eigen::MatrixXd::Identity(dim, dim));
  }
  return MultivariateGMM(w, means, covs);
}

UnivariateGMM random_univariate(Rng& rng, int comps) {
  Eigen::VectorXd w(comps), mu(comps), sd(comps);
  for (int j = 0; j < comps; ++j) {
    w[j] = 0.2 + rng.uniform();
    mu[j] = 6.0 * rng.uniform() - 3.0;
    sd[j] = 0.3 + 1.7 * rng.uniform();
  }
  w /= w.sum();
  return UnivariateGMM(w, mu, sd);
}

Eigen::VectorXd random_unit(Rng& rng, int dim) {
  Eigen::VectorXd v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    norm = v.norm();
  } while (norm < 1e-6);
  return v / norm;
}

Eigen::VectorXd sample_univariate(const UnivariateGMM& gmm, int n, Rng& rng) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    double cdf = 0.0;
    int pick = gmm.components() - 1;
    for (int j = 0; j < gmm.components(); ++j) {
      cdf += gmm.weights()[j];
      if (u < cdf) {
        pick = j;
        break;
      }
    }
    x[i] = gmm.means()[pick] + gmm.stddevs()[pick] * rng.normal();
  }
  return x;
}

// Fixed two-component generator in 3-d: well separated along the first axis,
// mildly correlated covariances. Shared by the end-to-end and invariance
// checks.
MultivariateGMM reference_generator() {
  Eigen::VectorXd w(2);
  w << 0.4, 0.6;
  Eigen::VectorXd m0(3), m1(3);
  m0 << -2.0, 0.0, 1.0;
  m1 << 2.0, 1.0, -1.0;
  Eigen::MatrixXd c0(3, 3), c1(3, 3);
  c0 << 1.0, 0.2, 0.0,
        0.2, 1.5, 0.3,
        0.0, 0.3, 0.8;
  c1 << 1.2, -0.3, 0.0,
        -0.3, 0.9, 0.1,
        0.0, 0.1, 1.1;
  return MultivariateGMM(w, {m0, m1}, {c0, c1});
}

// ---------------------------------------------------------------------------
// 1. The projected moment of a mixture equals the multinomial expansion of
//    its multivariate moments, for random (mixture, direction, degree).

Outcome check_expansion_identity() {
  constexpr double kRelTol = 1e-9;
  constexpr int kTrials = 50;
  Rng rng(20260801);
  double worst = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    const int dim = 1 + static_cast<int>(rng.uniform_index(5));
    const int comps = 1 + static_cast<int>(rng.uniform_index(3));
    const int degree = 1 + static_cast<int>(rng.uniform_index(4));
    MultivariateGMM gmm = random_mixture(rng, dim, comps);
    Eigen::VectorXd theta = random_unit(rng, dim);

    const double sliced = sliced_gmm_moment(gmm, theta, degree);
    double expanded = 0.0;
    for (const MultiIndex& alpha :
         enumerate_multi_indices(dim, degree).indices) {
      double monomial = 1.0;
      for (int i = 0; i < dim; ++i) {
        monomial *= std::pow(theta[i], alpha.exponents[static_cast<std::size_t>(i)]);
      }
      expanded += static_cast<double>(multinomial_coefficient(degree, alpha)) *
                  monomial * multivariate_gmm_moment(gmm, alpha);
    }
    worst = std::max(worst, std::abs(sliced - expanded) /
                                std::max(1.0, std::abs(sliced)));
  }
  return {worst <= kRelTol,
          "50 random (mixture, direction, degree<=4) triples in dim<=5, "
          "max rel err " + fmt(worst) + " (tol 1e-9)"};
}

// ---------------------------------------------------------------------------
// 2. With exact per-slice parameters (no EM, no noise), least squares returns
//    the multivariate moments to solver precision.

Outcome check_noiseless_recovery() {
  constexpr double kRelTol = 1e-7;
  Rng rng(4242);
  MultivariateGMM gmm = random_mixture(rng, 4, 3);
  double worst = 0.0;
  for (int degree : {1, 2, 3}) {
    const int unknowns = static_cast<int>(monomial_count(4, degree));
    SliceSet slices = generate_directions(4, 2 * unknowns, 900 + degree);
    Descriptor descriptor = exact_descriptor(gmm, slices);
    SolveResult solved = recover_moments(descriptor, degree);
    MomentVector truth = multivariate_moment_vector(gmm, degree);
    const double rel =
        (solved.moments.values - truth.values).norm() / truth.values.norm();
    worst = std::max(worst, rel);
  }
  return {worst <= kRelTol,
          "3-component mixture in dim 4, degrees 1..3, 2x slices, "
          "max rel err " + fmt(worst) + " (tol 1e-7)"};
}

// ---------------------------------------------------------------------------
// 3. Recovery error scales like 1/sqrt(slices) and 1/sqrt(samples): the
//    fitted log-log slope sits near -1/2, and quadrupling the sample count
//    halves the error.

Outcome check_error_scaling() {
  constexpr double kSlopeLo = -0.65;
  constexpr double kSlopeHi = -0.35;
  constexpr double kPairTol = 0.25;

  RateStudyConfig config{reference_generator(),
                         2,
                         {16, 32, 64, 128, 256, 512, 1024},
                         50,
                         1.0,
                         100.0,
                         0.0,
                         20260803};
  RateStudyResult base = rate_study(config);
  RateStudyConfig quad_config = config;
  quad_config.sample_size = 400.0;
  RateStudyResult quad = rate_study(quad_config);

  const bool slope_ok = base.fitted_log_slope >= kSlopeLo &&
                        base.fitted_log_slope <= kSlopeHi;
  double worst_pair = 0.0;
  for (std::size_t i = 0; i < base.table.size(); ++i) {
    const double half = 0.5 * base.table[i].rmse_mean;
    worst_pair = std::max(
        worst_pair, std::abs(quad.table[i].rmse_mean - half) / half);
  }
  const bool pair_ok = worst_pair <= kPairTol;
  return {slope_ok && pair_ok,
          "slope " + fmt(base.fitted_log_slope) +
              " (window [-0.65, -0.35]), 4x-samples deviation from half "
              "error " + fmt(worst_pair) + " (tol 0.25)"};
}

// ---------------------------------------------------------------------------
// 4. EM: the log-likelihood never drops between updates (100 randomized
//    fits), the single-component fit equals the sample statistics, and a
//    well-separated two-component mixture is recovered accurately.

Outcome check_em() {
  Rng rng(515151);
  bool ascent_ok = true;
  double worst_drop = 0.0;
  int exempt_transitions = 0;
  for (int t = 0; t < 100; ++t) {
    const int true_comps = 1 + static_cast<int>(rng.uniform_index(3));
    UnivariateGMM generator = random_univariate(rng, true_comps);
    const int n = 60 + static_cast<int>(rng.uniform_index(341));
    Eigen::VectorXd x = sample_univariate(generator, n, rng);

    EMConfig config;
    config.components = 1 + static_cast<int>(rng.uniform_index(4));
    config.restarts = 2;
    config.max_iters = 80;
    config.seed = rng.next_u64();
    FitReport fit = fit_gmm1d(x, config);

    const double slack = 1e-9 * static_cast<double>(n);
    for (std::size_t j = 0; j + 1 < fit.loglik_trace.size(); ++j) {
      const int step = static_cast<int>(j) + 1;
      if (std::find(fit.reseed_iterations.begin(),
                    fit.reseed_iterations.end(),
                    step) != fit.reseed_iterations.end()) {
        ++exempt_transitions;
        continue;
      }
      const double drop = fit.loglik_trace[j] - fit.loglik_trace[j + 1];
      worst_drop = std::max(worst_drop, drop);
      if (drop > slack) ascent_ok = false;
    }
  }

  // Single component: closed-form moment match.
  Eigen::VectorXd y = sample_univariate(random_univariate(rng, 2), 500, rng);
  EMConfig single;
  single.components = 1;
  FitReport fit1 = fit_gmm1d(y, single);
  const double mean = y.mean();
  const double variance = (y.array() - mean).square().sum() /
                          static_cast<double>(y.size());
  const bool single_ok =
      std::abs(fit1.gmm.means()[0] - mean) <= 1e-12 * (1.0 + std::abs(mean)) &&
      std::abs(fit1.gmm.stddevs()[0] * fit1.gmm.stddevs()[0] - variance) <=
          1e-12 * (1.0 + variance);

  // Two far modes at -10 and +10.
  Eigen::VectorXd w2(2), mu2(2), sd2(2);
  w2 << 0.5, 0.5;
  mu2 << -10.0, 10.0;
  sd2 << 1.0, 1.0;
  Eigen::VectorXd z = sample_univariate(UnivariateGMM(w2, mu2, sd2), 5000, rng);
  EMConfig pair;
  pair.components = 2;
  pair.restarts = 3;
  FitReport fit2 = fit_gmm1d(z, pair);
  const bool pair_ok =
      std::abs(fit2.gmm.means()[0] + 10.0) <= 0.1 &&
      std::abs(fit2.gmm.means()[1] - 10.0) <= 0.1 &&
      std::abs(fit2.gmm.weights()[0] - 0.5) <= 0.05 &&
      std::abs(fit2.gmm.weights()[1] - 0.5) <= 0.05;

  return {ascent_ok && single_ok && pair_ok,
          "worst likelihood drop " + fmt(worst_drop) + " (slack 1e-9*n, " +
              std::to_string(exempt_transitions) +
              " reseed transitions exempt), single-component match " +
              (single_ok ? "ok" : "FAILED") + ", far-mode recovery " +
              (pair_ok ? "ok" : "FAILED")};
}

// ---------------------------------------------------------------------------
// 5. End to end on samples: fit descriptors on 50000 draws from a known
//    two-component generator (components matched, 64 slices) and recover its
//    degree-2 moments within 10% relative error, median over 10 seeds.

Outcome check_end_to_end() {
  constexpr double kMedianTol = 0.10;
  MultivariateGMM generator = reference_generator();
  MomentVector truth = multivariate_moment_vector(generator, 2);

  DescriptorConfig config;
  config.slices = 64;
  config.components = 2;
  config.em.restarts = 1;
  config.em.max_iters = 60;
  config.em.rel_tol = 1e-6;

  std::vector<double> errors;
  for (int s = 0; s < 10; ++s) {
    PointSet points = sample_gmm(generator, 50000, 7000 + s);
    config.seed = static_cast<std::uint64_t>(s);
    Descriptor descriptor = emperor_descriptor(points, config);
    SolveResult solved = recover_moments(descriptor, 2);
    errors.push_back((solved.moments.values - truth.values).norm() /
                     truth.values.norm());
  }
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[4] + sorted[5]);
  return {median <= kMedianTol,
          "median degree-2 rel err " + fmt(median) + " over 10 seeds "
          "(tol 0.10), worst " + fmt(sorted.back())};
}

// ---------------------------------------------------------------------------
// 6. The moment-matrix feasibility check accepts the moments of 100 random
//    univariate mixtures up to order 4 and rejects the infeasible sequence
//    (1, 0, -1).

Outcome check_feasibility() {
  Rng rng(606060);
  bool all_psd = true;
  double worst_min_eig = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int comps = 1 + static_cast<int>(rng.uniform_index(4));
    UnivariateGMM gmm = random_univariate(rng, comps);
    HankelReport report =
        hankel_psd_check(univariate_moment_sequence(gmm, 8), 4);
    worst_min_eig = std::min(worst_min_eig, report.min_eigenvalue);
    all_psd = all_psd && report.is_psd;
  }
  const bool rejects_invalid =
      !hankel_psd_check(MomentSequence{{1.0, 0.0, -1.0}}, 1).is_psd;
  return {all_psd && rejects_invalid,
          "100 random mixtures feasible to order 4 (worst min eig " +
              fmt(worst_min_eig) + "), invalid sequence rejected: " +
              (rejects_invalid ? "yes" : "NO")};
}

// ---------------------------------------------------------------------------
// 7. On the matched-moments benchmark (identical mean and covariance per
//    class), mean and covariance poolings stay near chance while the
//    descriptor separates the classes.

Outcome check_benchmark() {
  constexpr double kBaselineCap = 0.60;
  constexpr double kDescriptorFloor = 0.85;

  BenchmarkConfig config;  // dim 4, separation 0.9, 200 sets/class, 500 pts
  DescriptorConfig descriptor;
  descriptor.slices = 32;
  descriptor.components = 2;
  descriptor.em.restarts = 2;
  descriptor.em.max_iters = 60;
  descriptor.em.rel_tol = 1e-6;
  config.methods = default_bench_methods(descriptor);

  BenchmarkReport report = run_benchmark(config);
  double gap_acc = -1.0, cov_acc = -1.0, emperor_acc = -1.0;
  for (const MethodSummary& s : summarize_benchmark(report)) {
    if (s.method == "gap") gap_acc = s.test_mean;
    if (s.method == "cov") cov_acc = s.test_mean;
    if (s.method == "emperor") emperor_acc = s.test_mean;
  }
  const bool pass = gap_acc >= 0.0 && cov_acc >= 0.0 && emperor_acc >= 0.0 &&
                    gap_acc <= kBaselineCap && cov_acc <= kBaselineCap &&
                    emperor_acc >= kDescriptorFloor;
  return {pass,
          "mean test accuracy over 5 seeds: gap " + fmt(gap_acc) +
              ", cov " + fmt(cov_acc) + " (cap 0.60), descriptor " +
              fmt(emperor_acc) + " (floor 0.85)"};
}

// ---------------------------------------------------------------------------
// 8. Determinism and invariance: byte-identical descriptors across repeated
//    runs and thread counts, bitwise permutation invariance of descriptors
//    and poolings, and rotation consistency of projected moments.

Outcome check_invariance() {
  constexpr double kRotationTol = 1e-10;
  MultivariateGMM generator = reference_generator();
  PointSet points = sample_gmm(generator, 3000, 31);

  DescriptorConfig config;
  config.slices = 16;
  config.components = 2;
  config.em.restarts = 2;
  config.seed = 9;

  Descriptor first = emperor_descriptor(points, config, 1);
  Descriptor rerun =
      emperor_descriptor(sample_gmm(generator, 3000, 31), config, 1);
  Descriptor threaded = emperor_descriptor(points, config, 4);
  const std::string bytes = descriptor_to_json(first).dump();
  const bool rerun_identical = bytes == descriptor_to_json(rerun).dump();
  const bool threads_identical = bytes == descriptor_to_json(threaded).dump();

  Eigen::MatrixXd shuffled = points.points();
  Rng perm(77);
  for (Eigen::Index i = shuffled.rows() - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(
        perm.uniform_index(static_cast<std::uint64_t>(i) + 1));
    shuffled.row(i).swap(shuffled.row(j));
  }
  PointSet permuted(shuffled);
  const bool descriptor_invariant =
      flatten(emperor_descriptor(permuted, config, 1)) == flatten(first);
  bool pools_invariant = true;
  for (Pooling pooling :
       {Pooling::Gap, Pooling::Max, Pooling::GeM, Pooling::Cov}) {
    pools_invariant = pools_invariant &&
                      baseline_pool(permuted, pooling) ==
                          baseline_pool(points, pooling);
  }

  // Rotation: project the rotated mixture onto the rotated direction.
  Rng rot_rng(4040);
  Eigen::MatrixXd raw(3, 3);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) raw(r, c) = rot_rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 3; ++i) {
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  }
  std::vector<Eigen::VectorXd> rot_means;
  std::vector<Eigen::MatrixXd> rot_covs;
  for (int j = 0; j < generator.components(); ++j) {
    rot_means.push_back(q * generator.means()[static_cast<std::size_t>(j)]);
    Eigen::MatrixXd sigma =
        q * generator.covariances()[static_cast<std::size_t>(j)] *
        q.transpose();
    rot_covs.push_back(0.5 * (sigma + sigma.transpose()));
  }
  MultivariateGMM rotated(generator.weights(), rot_means, rot_covs);

  SliceSet directions = generate_directions(3, 8, 55);
  double worst_rotation = 0.0;
  for (Eigen::Index l = 0; l < directions.count(); ++l) {
    Eigen::VectorXd theta = directions.directions.row(l).transpose();
    Eigen::VectorXd rotated_theta = (q * theta).normalized();
    for (int degree = 1; degree <= 4; ++degree) {
      const double direct = sliced_gmm_moment(generator, theta, degree);
      const double via_rotation =
          sliced_gmm_moment(rotated, rotated_theta, degree);
      worst_rotation =
          std::max(worst_rotation, std::abs(direct - via_rotation));
    }
  }
  const bool rotation_ok = worst_rotation <= kRotationTol;

  const bool pass = rerun_identical && threads_identical &&
                    descriptor_invariant && pools_invariant && rotation_ok;
  return {pass,
          std::string("rerun bytes ") + (rerun_identical ? "ok" : "DIFFER") +
              ", threads=4 bytes " + (threads_identical ? "ok" : "DIFFER") +
              ", permutation " +
              ((descriptor_invariant && pools_invariant) ? "ok" : "BROKEN") +
              ", rotation max dev " + fmt(worst_rotation) + " (tol 1e-10)"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
  double budget_seconds;  // 0: no runtime cap
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"projected moments match the multinomial expansion",
       check_expansion_identity, 10.0},
      {"noiseless recovery is exact", check_noiseless_recovery, 5.0},
      {"error scales with slice and sample counts", check_error_scaling,
       120.0},
      {"EM ascent and mixture recovery", check_em, 0.0},
      {"end-to-end moment recovery from samples", check_end_to_end, 60.0},
      {"moment-matrix feasibility diagnostics", check_feasibility, 0.0},
      {"matched-moments benchmark separability", check_benchmark, 300.0},
      {"determinism, permutation and rotation invariance", check_invariance,
       0.0},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    bool pass = outcome.pass;
    std::string timing = fmt(elapsed) + "s";
    if (criteria[i].budget_seconds > 0.0) {
      timing += " of " + fmt(criteria[i].budget_seconds) + "s";
      if (elapsed >= criteria[i].budget_seconds) pass = false;
    }
    if (!pass) ++failures;
    std::printf("[%s] %zu. %s (%s) %s\n", pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, timing.c_str(), outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu checks passed\n",
              criteria.size() - static_cast<std::size_t>(failures),
              criteria.size());
  return failures;
}
