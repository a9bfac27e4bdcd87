#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "emperor/gmm1d.hpp"
#include "emperor/model.hpp"
#include "emperor/slicing.hpp"

namespace emperor {

struct DescriptorConfig {
  int slices = 64;
  int components = 3;
  /// Per-slice EM settings. The `components` and `seed` fields inside are
  /// ignored; the descriptor-level values above/below take their place.
  EMConfig em;
  DirectionScheme scheme = DirectionScheme::IidGaussianNormalized;
  std::uint64_t seed = 0;
  /// When set, each projection is centered/scaled before fitting and the
  /// fitted parameters are mapped back, which only changes which local
  /// optimum EM lands in, not the parameterization stored here.
  bool standardize_slices = false;
};

/// One fitted slice. The mixture is always expressed in the original
/// (unstandardized) projection coordinates; center/scale record the affine
/// map that was applied before fitting (identity unless standardization was
/// on).
struct SliceFit {
  UnivariateGMM gmm;
  double center = 0.0;
  double scale = 1.0;
};

struct Descriptor {
  SliceSet slices;
  std::vector<SliceFit> per_slice;
  DescriptorConfig config;
  std::vector<std::string> warnings;

  int dimension() const { return static_cast<int>(slices.dimension()); }
  int slice_count() const { return static_cast<int>(slices.count()); }
  int components() const { return config.components; }
};

/// Builds the descriptor of a point set: draw `config.slices` directions from
/// `config.seed`, project, and fit a `config.components`-component mixture to
/// every projection. Per-slice fits run independently (parallelizable over
/// `threads`) on substreams derived from the descriptor seed, so the result
/// is bitwise identical for any thread count and any row order of the input.
/// A slice whose fit fails is replaced by a moment-matched single-mode
/// fallback and noted in `warnings`.
Descriptor emperor_descriptor(const PointSet& points,
                              const DescriptorConfig& config, int threads = 1);

/// Descriptor of a known mixture: each slice holds the exact pushforward
/// parameters (weights unchanged, means/variances projected) instead of an
/// EM fit. Useful as ground truth when testing recovery.
Descriptor exact_descriptor(const MultivariateGMM& gmm, const SliceSet& slices);

/// Fixed-width feature layout: slice-major, component-minor, (weight, mean,
/// stddev) triplets; length 3 * components * slices.
Eigen::VectorXd flatten(const Descriptor& descriptor);

enum class Pooling { Gap, Max, GeM, Cov };

struct PoolingOptions {
  double gem_power = 3.0;
  /// Strict generalized-mean requires nonnegative inputs and fails otherwise;
  /// the default applies the power map sign-symmetrically instead.
  bool gem_strict = false;
};

/// Order-insensitive reference poolings over the rows of a point set:
///   Gap: coordinate-wise mean (length d)
///   Max: coordinate-wise max (length d)
///   GeM: generalized mean with exponent gem_power (length d)
///   Cov: mean followed by the upper triangle of the biased covariance,
///        row-major (length d + d(d+1)/2)
/// All sums run over sorted addends, so the output is bitwise invariant to
/// row permutations.
Eigen::VectorXd baseline_pool(const PointSet& points, Pooling pooling,
                              const PoolingOptions& options = {});

const char* pooling_name(Pooling pooling);

}  // namespace emperor
