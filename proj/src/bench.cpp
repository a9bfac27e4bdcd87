#include "emperor/bench.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "emperor/errors.hpp"
#include "emperor/parallel.hpp"
#include "emperor/rng.hpp"

namespace emperor {

namespace {

constexpr std::uint64_t kDatasetTag = 0xDA7A;
constexpr std::uint64_t kSplitTag = 0x5717;

void shuffle_indices(std::vector<int>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(idx[i - 1], idx[j]);
  }
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& scores) {
  Eigen::ArrayXXd a = scores.array();
  Eigen::ArrayXd row_max = a.rowwise().maxCoeff();
  a.colwise() -= row_max;
  a = a.exp();
  Eigen::ArrayXd row_sum = a.rowwise().sum();
  a.colwise() /= row_sum;
  return a.matrix();
}

double mean_cross_entropy(const Eigen::MatrixXd& probs,
                          const std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const double p = probs(i, labels[static_cast<std::size_t>(i)]);
    total += -std::log(std::max(p, 1e-300));
  }
  return total / static_cast<double>(probs.rows());
}

}  // namespace

MultivariateGMM matched_moments_class_a(int dimension) {
  if (dimension < 1) {
    fail(ErrorCode::InvalidArgument, "dimension must be >= 1");
  }
  Eigen::VectorXd w = Eigen::VectorXd::Ones(1);
  std::vector<Eigen::VectorXd> means{Eigen::VectorXd::Zero(dimension)};
  std::vector<Eigen::MatrixXd> covs{
      Eigen::MatrixXd::Identity(dimension, dimension)};
  return MultivariateGMM(w, means, covs);
}

MultivariateGMM matched_moments_class_b(int dimension, double separation) {
  if (dimension < 1) {
    fail(ErrorCode::InvalidArgument, "dimension must be >= 1");
  }
  if (!(separation > 0.0) || !(separation < 1.0)) {
    fail(ErrorCode::InvalidArgument,
         "separation must lie strictly between 0 and 1 so the shrunk "
         "component covariance stays positive definite");
  }
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(dimension);
  mu[0] = separation;
  // I - mu mu^T keeps the mixture's total covariance at the identity.
  Eigen::MatrixXd cov =
      Eigen::MatrixXd::Identity(dimension, dimension) - mu * mu.transpose();
  Eigen::VectorXd w = Eigen::VectorXd::Constant(2, 0.5);
  std::vector<Eigen::VectorXd> means{mu, -mu};
  std::vector<Eigen::MatrixXd> covs{cov, cov};
  return MultivariateGMM(w, means, covs);
}

SyntheticDataset make_matched_moments_dataset(int dimension,
                                              double separation,
                                              int sets_per_class,
                                              int points_per_set,
                                              std::uint64_t seed) {
  if (sets_per_class < 2) {
    fail(ErrorCode::InvalidArgument, "need at least 2 sets per class");
  }
  if (points_per_set < 1) {
    fail(ErrorCode::InvalidArgument, "need at least 1 point per set");
  }
  const MultivariateGMM a = matched_moments_class_a(dimension);
  const MultivariateGMM b = matched_moments_class_b(dimension, separation);

  SyntheticDataset ds;
  ds.dimension = dimension;
  ds.sets.reserve(static_cast<std::size_t>(2 * sets_per_class));
  ds.labels.reserve(static_cast<std::size_t>(2 * sets_per_class));
  for (int cls = 0; cls < 2; ++cls) {
    const MultivariateGMM& gen = cls == 0 ? a : b;
    for (int i = 0; i < sets_per_class; ++i) {
      const std::uint64_t set_seed =
          mix_seed(mix_seed(seed, static_cast<std::uint64_t>(cls)),
                   static_cast<std::uint64_t>(i));
      ds.sets.push_back(sample_gmm(gen, points_per_set, set_seed));
      ds.labels.push_back(cls);
    }
  }
  return ds;
}

LinearClassifier train_linear_classifier(const Eigen::MatrixXd& features,
                                         const std::vector<int>& labels,
                                         const ClassifierConfig& config) {
  const Eigen::Index n = features.rows();
  const Eigen::Index f = features.cols();
  if (n == 0 || f == 0) {
    fail(ErrorCode::EmptyInput, "classifier needs a nonempty feature matrix");
  }
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    fail(ErrorCode::DimensionMismatch,
         "label count does not match feature rows");
  }
  if (!features.allFinite()) {
    fail(ErrorCode::NonFiniteEntry, "features contain a non-finite value");
  }
  int classes = 0;
  for (int lab : labels) {
    if (lab < 0) fail(ErrorCode::InvalidArgument, "labels must be >= 0");
    classes = std::max(classes, lab + 1);
  }
  if (classes < 2) {
    fail(ErrorCode::InvalidArgument, "need at least two distinct classes");
  }
  if (config.epochs < 1 || !(config.step > 0.0) || !(config.l2 >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "bad classifier configuration");
  }

  LinearClassifier model;
  model.feature_mean = features.colwise().mean();
  Eigen::ArrayXd var =
      (features.rowwise() - model.feature_mean.transpose())
          .array()
          .square()
          .colwise()
          .mean();
  model.feature_scale = var.sqrt().matrix();
  for (Eigen::Index j = 0; j < f; ++j) {
    if (model.feature_scale[j] < 1e-12) model.feature_scale[j] = 1.0;
  }
  Eigen::MatrixXd z =
      (features.rowwise() - model.feature_mean.transpose()).array().rowwise() /
      model.feature_scale.transpose().array();

  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, classes);
  for (Eigen::Index i = 0; i < n; ++i) {
    onehot(i, labels[static_cast<std::size_t>(i)]) = 1.0;
  }

  model.weights = Eigen::MatrixXd::Zero(classes, f);
  model.bias = Eigen::VectorXd::Zero(classes);
  double step = config.step;

  Eigen::MatrixXd probs =
      softmax_rows((z * model.weights.transpose()).rowwise() +
                   model.bias.transpose());
  double loss = mean_cross_entropy(probs, labels) +
                0.5 * config.l2 * model.weights.squaredNorm();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const Eigen::MatrixXd delta = probs - onehot;  // n x classes
    const Eigen::MatrixXd grad_w =
        delta.transpose() * z / static_cast<double>(n) +
        config.l2 * model.weights;
    const Eigen::VectorXd grad_b =
        delta.colwise().mean().transpose();

    bool accepted = false;
    while (step >= 1e-15) {
      const Eigen::MatrixXd w_try = model.weights - step * grad_w;
      const Eigen::VectorXd b_try = model.bias - step * grad_b;
      const Eigen::MatrixXd p_try = softmax_rows(
          (z * w_try.transpose()).rowwise() + b_try.transpose());
      const double loss_try = mean_cross_entropy(p_try, labels) +
                              0.5 * config.l2 * w_try.squaredNorm();
      if (loss_try <= loss) {
        model.weights = w_try;
        model.bias = b_try;
        probs = p_try;
        loss = loss_try;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no usable step left; converged
  }
  model.final_loss = loss;
  return model;
}

std::vector<int> classify(const LinearClassifier& model,
                          const Eigen::MatrixXd& features) {
  if (features.cols() != model.weights.cols()) {
    fail(ErrorCode::WidthMismatch,
         "feature width " + std::to_string(features.cols()) +
             " does not match the trained width " +
             std::to_string(model.weights.cols()));
  }
  Eigen::MatrixXd z =
      (features.rowwise() - model.feature_mean.transpose()).array().rowwise() /
      model.feature_scale.transpose().array();
  Eigen::MatrixXd scores =
      (z * model.weights.transpose()).rowwise() + model.bias.transpose();
  std::vector<int> out(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    Eigen::Index best = 0;
    scores.row(i).maxCoeff(&best);  // first max -> lowest class on ties
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

double accuracy(const std::vector<int>& predicted,
                const std::vector<int>& labels) {
  if (predicted.size() != labels.size() || predicted.empty()) {
    fail(ErrorCode::DimensionMismatch,
         "prediction/label size mismatch or empty");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

std::vector<BenchMethod> default_bench_methods(
    const DescriptorConfig& descriptor) {
  std::vector<BenchMethod> methods;
  for (Pooling p :
       {Pooling::Gap, Pooling::Max, Pooling::GeM, Pooling::Cov}) {
    BenchMethod m;
    m.name = pooling_name(p);
    m.pooling = p;
    methods.push_back(std::move(m));
  }
  BenchMethod e;
  e.name = "emperor";
  e.use_descriptor = true;
  e.descriptor = descriptor;
  methods.push_back(std::move(e));
  return methods;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config, int threads) {
  if (config.methods.empty()) {
    fail(ErrorCode::InvalidArgument, "benchmark needs at least one method");
  }
  if (config.seeds.empty()) {
    fail(ErrorCode::InvalidArgument, "benchmark needs at least one seed");
  }
  if (!(config.train_fraction > 0.0) || !(config.train_fraction < 1.0)) {
    fail(ErrorCode::InvalidArgument,
         "train fraction must lie strictly between 0 and 1");
  }

  BenchmarkReport report;
  for (const std::uint64_t seed : config.seeds) {
    SyntheticDataset ds = make_matched_moments_dataset(
        config.dimension, config.separation, config.sets_per_class,
        config.points_per_set, mix_seed(seed, kDatasetTag));
    const auto n_sets = ds.sets.size();

    // Stratified split: shuffle within each class, take the first
    // round(fraction * class size) for training.
    std::vector<int> train_idx;
    std::vector<int> test_idx;
    for (int cls = 0; cls < 2; ++cls) {
      std::vector<int> members;
      for (std::size_t i = 0; i < n_sets; ++i) {
        if (ds.labels[i] == cls) members.push_back(static_cast<int>(i));
      }
      Rng rng(mix_seed(mix_seed(seed, kSplitTag),
                       static_cast<std::uint64_t>(cls)));
      shuffle_indices(members, rng);
      const auto n_train = static_cast<std::size_t>(
          std::lround(config.train_fraction *
                      static_cast<double>(members.size())));
      for (std::size_t i = 0; i < members.size(); ++i) {
        (i < n_train ? train_idx : test_idx).push_back(members[i]);
      }
    }

    for (const BenchMethod& method : config.methods) {
      // Featurize every set once; the descriptor config is shared across
      // sets so columns line up.
      std::vector<Eigen::VectorXd> feats(n_sets);
      parallel_for(n_sets, threads, [&](std::size_t i) {
        if (method.use_descriptor) {
          feats[i] = flatten(
              emperor_descriptor(ds.sets[i], method.descriptor, 1));
        } else {
          feats[i] = baseline_pool(ds.sets[i], method.pooling);
        }
      });
      const Eigen::Index width = feats.front().size();
      Eigen::MatrixXd train_x(train_idx.size(), width);
      Eigen::MatrixXd test_x(test_idx.size(), width);
      std::vector<int> train_y;
      std::vector<int> test_y;
      for (std::size_t i = 0; i < train_idx.size(); ++i) {
        train_x.row(static_cast<Eigen::Index>(i)) =
            feats[static_cast<std::size_t>(train_idx[i])].transpose();
        train_y.push_back(ds.labels[static_cast<std::size_t>(train_idx[i])]);
      }
      for (std::size_t i = 0; i < test_idx.size(); ++i) {
        test_x.row(static_cast<Eigen::Index>(i)) =
            feats[static_cast<std::size_t>(test_idx[i])].transpose();
        test_y.push_back(ds.labels[static_cast<std::size_t>(test_idx[i])]);
      }

      LinearClassifier model =
          train_linear_classifier(train_x, train_y, config.classifier);
      BenchRow row;
      row.method = method.name;
      row.seed = seed;
      row.train_accuracy = accuracy(classify(model, train_x), train_y);
      row.test_accuracy = accuracy(classify(model, test_x), test_y);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::vector<MethodSummary> summarize_benchmark(const BenchmarkReport& report) {
  std::vector<MethodSummary> out;
  for (const BenchRow& row : report.rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const MethodSummary& s) {
      return s.method == row.method;
    });
    if (it == out.end()) {
      out.push_back(MethodSummary{row.method, 0.0, 0.0, 0.0});
      it = out.end() - 1;
    }
    it->train_mean += row.train_accuracy;
    it->test_mean += row.test_accuracy;
  }
  for (MethodSummary& s : out) {
    int count = 0;
    for (const BenchRow& row : report.rows) {
      if (row.method == s.method) ++count;
    }
    s.train_mean /= count;
    s.test_mean /= count;
    double ss = 0.0;
    for (const BenchRow& row : report.rows) {
      if (row.method == s.method) {
        ss += (row.test_accuracy - s.test_mean) *
              (row.test_accuracy - s.test_mean);
      }
    }
    s.test_std = count > 1 ? std::sqrt(ss / (count - 1)) : 0.0;
  }
  return out;
}

std::string format_benchmark_table(const BenchmarkReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "method" << std::right << std::setw(12)
     << "train_mean" << std::setw(12) << "test_mean" << std::setw(12)
     << "test_std" << '\n';
  os << std::string(48, '-') << '\n';
  os << std::fixed << std::setprecision(4);
  for (const MethodSummary& s : summarize_benchmark(report)) {
    os << std::left << std::setw(12) << s.method << std::right
       << std::setw(12) << s.train_mean << std::setw(12) << s.test_mean
       << std::setw(12) << s.test_std << '\n';
  }
  return os.str();
}

}  // namespace emperor
