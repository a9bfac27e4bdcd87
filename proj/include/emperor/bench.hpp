#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "emperor/descriptor.hpp"
#include "emperor/model.hpp"

namespace emperor {

/// The two synthetic classes share their mean (zero) and covariance (the
/// identity) exactly, so first/second-order poolings carry no label signal;
/// the classes differ only from the third moment up.
///
/// Class A is a standard Gaussian. Class B is a symmetric two-component
/// mixture at +-separation * e1 whose component covariance is shrunk along
/// e1 to restore unit total covariance. Requires 0 < separation < 1.
MultivariateGMM matched_moments_class_a(int dimension);
MultivariateGMM matched_moments_class_b(int dimension, double separation);

struct SyntheticDataset {
  std::vector<PointSet> sets;
  std::vector<int> labels;  // 0 = class A, 1 = class B
  int dimension = 0;
};

SyntheticDataset make_matched_moments_dataset(int dimension,
                                              double separation,
                                              int sets_per_class,
                                              int points_per_set,
                                              std::uint64_t seed);

/// Multinomial logistic regression trained by full-batch gradient descent
/// with backtracking (halve the step on any loss increase). The features are
/// z-scored internally from the training rows; weights start at zero, so
/// training is deterministic.
struct ClassifierConfig {
  int epochs = 300;
  double step = 1.0;
  double l2 = 1e-4;
};

struct LinearClassifier {
  Eigen::MatrixXd weights;       // classes x features
  Eigen::VectorXd bias;          // classes
  Eigen::VectorXd feature_mean;  // internal standardization
  Eigen::VectorXd feature_scale;
  double final_loss = 0.0;
};

LinearClassifier train_linear_classifier(const Eigen::MatrixXd& features,
                                         const std::vector<int>& labels,
                                         const ClassifierConfig& config = {});

std::vector<int> classify(const LinearClassifier& model,
                          const Eigen::MatrixXd& features);

double accuracy(const std::vector<int>& predicted,
                const std::vector<int>& labels);

/// One benchmark method: either a reference pooling or the sliced-mixture
/// descriptor.
struct BenchMethod {
  std::string name;
  bool use_descriptor = false;
  Pooling pooling = Pooling::Gap;
  DescriptorConfig descriptor;
};

struct BenchmarkConfig {
  int dimension = 4;
  double separation = 0.9;
  int sets_per_class = 200;
  int points_per_set = 500;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  double train_fraction = 0.7;
  std::vector<BenchMethod> methods;
  ClassifierConfig classifier;
};

/// The benchmark's default method list: gap, max, gem, cov poolings plus the
/// descriptor with the supplied settings.
std::vector<BenchMethod> default_bench_methods(
    const DescriptorConfig& descriptor);

struct BenchRow {
  std::string method;
  std::uint64_t seed = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

struct BenchmarkReport {
  std::vector<BenchRow> rows;
};

/// Per seed: regenerate the dataset, split stratified train/test, featurize
/// every set once per method, train, score. Every descriptor across the run
/// shares one config (and therefore one direction set), which is what makes
/// the flattened features comparable between sets.
BenchmarkReport run_benchmark(const BenchmarkConfig& config, int threads = 1);

struct MethodSummary {
  std::string method;
  double train_mean = 0.0;
  double test_mean = 0.0;
  double test_std = 0.0;
};

std::vector<MethodSummary> summarize_benchmark(const BenchmarkReport& report);

std::string format_benchmark_table(const BenchmarkReport& report);

}  // namespace emperor
