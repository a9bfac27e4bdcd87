#include "emperor/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "emperor/errors.hpp"
#include "emperor/parallel.hpp"
#include "emperor/rng.hpp"

namespace emperor {

namespace {

// Domain-separation tag so per-slice fit streams never collide with the
// direction-sampling streams, which also derive from the descriptor seed.
constexpr std::uint64_t kFitStreamTag = 0xF17;

double sorted_sum(Eigen::VectorXd v) {
  std::sort(v.begin(), v.end());
  return v.sum();
}

void validate_descriptor_config(const DescriptorConfig& config) {
  if (config.slices < 1) {
    fail(ErrorCode::InvalidArgument, "descriptor needs at least one slice");
  }
  if (config.components < 1) {
    fail(ErrorCode::InvalidArgument,
         "descriptor needs at least one component per slice");
  }
}

// Single-mode stand-in matched to the projection's mean and spread, used when
// the EM fit for a slice throws.
SliceFit fallback_fit(const Eigen::VectorXd& sorted_projection,
                      int components) {
  const double mean = sorted_projection.mean();
  double var = (sorted_projection.array() - mean).square().mean();
  if (!(var > 0.0)) var = 1e-12;
  Eigen::VectorXd w =
      Eigen::VectorXd::Constant(components, 1.0 / components);
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(components, mean);
  Eigen::VectorXd sd = Eigen::VectorXd::Constant(components, std::sqrt(var));
  return SliceFit{UnivariateGMM(w, mu, sd), 0.0, 1.0};
}

}  // namespace

Descriptor emperor_descriptor(const PointSet& points,
                              const DescriptorConfig& config, int threads) {
  validate_descriptor_config(config);
  if (points.size() < config.components) {
    fail(ErrorCode::TooFewSamples,
         "point set has " + std::to_string(points.size()) +
             " rows but each slice fits " +
             std::to_string(config.components) + " components");
  }

  SliceSet slices = generate_directions(
      static_cast<int>(points.dimension()), config.slices, config.seed,
      config.scheme);

  const std::size_t count = static_cast<std::size_t>(config.slices);
  std::vector<SliceFit> fits(
      count, SliceFit{UnivariateGMM(Eigen::VectorXd::Ones(1),
                                    Eigen::VectorXd::Zero(1),
                                    Eigen::VectorXd::Ones(1)),
                      0.0, 1.0});
  std::vector<std::string> slice_warnings(count);

  parallel_for(count, threads, [&](std::size_t l) {
    const Eigen::VectorXd theta =
        slices.directions.row(static_cast<Eigen::Index>(l)).transpose();
    Eigen::VectorXd y = project(points, theta);
    // Sorting up front makes everything downstream (standardization stats
    // and the fit itself) a function of the value multiset only.
    std::sort(y.begin(), y.end());

    double center = 0.0;
    double scale = 1.0;
    Eigen::VectorXd z = y;
    if (config.standardize_slices) {
      center = y.mean();
      const double sd =
          std::sqrt((y.array() - center).square().mean());
      scale = sd > 0.0 ? sd : 1.0;
      z = ((y.array() - center) / scale).matrix();
    }

    EMConfig em = config.em;
    em.components = config.components;
    em.seed = mix_seed(mix_seed(config.seed, kFitStreamTag),
                       static_cast<std::uint64_t>(l));
    try {
      FitReport report = fit_gmm1d(z, em);
      UnivariateGMM fitted = report.gmm;
      if (config.standardize_slices) {
        Eigen::VectorXd mu =
            (center + scale * fitted.means().array()).matrix();
        Eigen::VectorXd sd = (scale * fitted.stddevs().array()).matrix();
        fitted = UnivariateGMM(fitted.weights(), mu, sd);
      }
      fits[l] = SliceFit{std::move(fitted), center, scale};
      if (report.floor_hit) {
        slice_warnings[l] =
            "slice " + std::to_string(l) + ": variance floor engaged";
      }
    } catch (const Error& e) {
      fits[l] = fallback_fit(y, config.components);
      slice_warnings[l] = "slice " + std::to_string(l) +
                          ": fit failed (" + e.what() +
                          "); moment-matched fallback used";
    }
  });

  Descriptor descriptor{std::move(slices), std::move(fits), config, {}};
  for (auto& w : slice_warnings) {
    if (!w.empty()) descriptor.warnings.push_back(std::move(w));
  }
  return descriptor;
}

Descriptor exact_descriptor(const MultivariateGMM& gmm,
                            const SliceSet& slices) {
  if (gmm.dimension() != static_cast<int>(slices.dimension())) {
    fail(ErrorCode::DimensionMismatch,
         "mixture dimension " + std::to_string(gmm.dimension()) +
             " does not match direction dimension " +
             std::to_string(slices.dimension()));
  }
  const int k = gmm.components();
  std::vector<SliceFit> fits;
  fits.reserve(static_cast<std::size_t>(slices.count()));
  for (Eigen::Index l = 0; l < slices.count(); ++l) {
    const Eigen::VectorXd theta = slices.directions.row(l).transpose();
    Eigen::VectorXd mu(k);
    Eigen::VectorXd sd(k);
    for (int j = 0; j < k; ++j) {
      mu[j] = theta.dot(gmm.means()[j]);
      sd[j] = std::sqrt(theta.dot(gmm.covariances()[j] * theta));
    }
    fits.push_back(SliceFit{
        sort_components(UnivariateGMM(gmm.weights(), mu, sd)), 0.0, 1.0});
  }

  DescriptorConfig config;
  config.slices = static_cast<int>(slices.count());
  config.components = k;
  config.scheme = slices.scheme;
  config.seed = slices.seed;
  return Descriptor{slices, std::move(fits), config, {}};
}

Eigen::VectorXd flatten(const Descriptor& descriptor) {
  const int k = descriptor.components();
  const int l = descriptor.slice_count();
  Eigen::VectorXd out(3 * k * l);
  Eigen::Index pos = 0;
  for (int s = 0; s < l; ++s) {
    const UnivariateGMM& g = descriptor.per_slice[static_cast<std::size_t>(s)].gmm;
    for (int j = 0; j < k; ++j) {
      out[pos++] = g.weights()[j];
      out[pos++] = g.means()[j];
      out[pos++] = g.stddevs()[j];
    }
  }
  return out;
}

Eigen::VectorXd baseline_pool(const PointSet& points, Pooling pooling,
                              const PoolingOptions& options) {
  const Eigen::Index n = points.size();
  const Eigen::Index d = points.dimension();
  const Eigen::MatrixXd& x = points.points();

  switch (pooling) {
    case Pooling::Gap: {
      Eigen::VectorXd out(d);
      for (Eigen::Index j = 0; j < d; ++j) {
        out[j] = sorted_sum(x.col(j)) / static_cast<double>(n);
      }
      return out;
    }
    case Pooling::Max: {
      return x.colwise().maxCoeff().transpose();
    }
    case Pooling::GeM: {
      const double p = options.gem_power;
      if (!(p >= 1.0)) {
        fail(ErrorCode::InvalidArgument,
             "generalized-mean power must be >= 1");
      }
      Eigen::VectorXd out(d);
      for (Eigen::Index j = 0; j < d; ++j) {
        Eigen::VectorXd col = x.col(j);
        if (options.gem_strict && (col.array() < 0.0).any()) {
          fail(ErrorCode::InvalidArgument,
               "strict generalized mean requires nonnegative inputs "
               "(coordinate " +
                   std::to_string(j) + ")");
        }
        Eigen::VectorXd powered =
            (col.array().abs().pow(p) * col.array().sign()).matrix();
        if (options.gem_strict) {
          powered = col.array().pow(p).matrix();
        }
        const double m = sorted_sum(powered) / static_cast<double>(n);
        out[j] = std::copysign(std::pow(std::abs(m), 1.0 / p), m);
      }
      return out;
    }
    case Pooling::Cov: {
      Eigen::VectorXd out(d + d * (d + 1) / 2);
      Eigen::VectorXd mean(d);
      for (Eigen::Index j = 0; j < d; ++j) {
        mean[j] = sorted_sum(x.col(j)) / static_cast<double>(n);
      }
      out.head(d) = mean;
      Eigen::Index pos = d;
      for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index m = j; m < d; ++m) {
          const double raw =
              sorted_sum((x.col(j).array() * x.col(m).array()).matrix()) /
              static_cast<double>(n);
          out[pos++] = raw - mean[j] * mean[m];
        }
      }
      return out;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown pooling");
}

const char* pooling_name(Pooling pooling) {
  switch (pooling) {
    case Pooling::Gap:
      return "gap";
    case Pooling::Max:
      return "max";
    case Pooling::GeM:
      return "gem";
    case Pooling::Cov:
      return "cov";
  }
  return "unknown";
}

}  // namespace emperor
