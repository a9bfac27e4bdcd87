#include "emperor/cli.hpp"

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <sstream>

#include "emperor/descriptor.hpp"
#include "emperor/errors.hpp"
#include "emperor/io.hpp"
#include "emperor/moments.hpp"
#include "emperor/reconstruct.hpp"

namespace emperor {

namespace {

struct DescribeOptions {
  std::string input;
  std::string output;
  std::string flat_output;
  int slices = 64;
  int components = 3;
  std::uint64_t seed = 0;
  std::string scheme = "iid_gaussian_normalized";
  bool standardize = false;
  int em_max_iters = 200;
  double em_rel_tol = 1e-8;
  int em_restarts = 5;
  double em_floor_scale = 1e-6;
  int threads = 1;
  int precision = -1;
};

struct ReconstructOptions {
  std::string descriptor;
  std::string output;
  int degree = 2;
  double ridge = -1.0;  // negative: pick automatically
  int precision = -1;
};

struct MomentOptions {
  std::string gmm;
  std::string output;
  std::string alpha;
  std::string theta;
  int degree = -1;
  int hankel = -1;
  int carleman = -1;
  int degree_cap = 6;
  int precision = -1;
};

struct RatesOptions {
  std::string config;
  std::string output;
  std::string summary;
  int threads = 1;
  int precision = -1;
};

struct BenchOptions {
  std::string config;
  std::string output;
  int threads = 1;
  int precision = -1;
};

struct DirectionsOptions {
  std::string output;
  int dim = 2;
  int count = 8;
  std::uint64_t seed = 0;
  std::string scheme = "iid_gaussian_normalized";
  int precision = -1;
};

std::vector<int> parse_int_list(const std::string& text,
                                const std::string& what) {
  std::vector<int> out;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, what + ": bad integer '" + tok + "'");
    }
  }
  if (out.empty()) fail(ErrorCode::ParseError, what + ": empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, what + ": bad number '" + tok + "'");
    }
  }
  if (out.empty()) fail(ErrorCode::ParseError, what + ": empty list");
  return out;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    atomic_write_text(path, content);
  }
}

int run_describe(const DescribeOptions& opt) {
  DescriptorConfig config;
  config.slices = opt.slices;
  config.components = opt.components;
  config.seed = opt.seed;
  config.scheme = scheme_from_name(opt.scheme);
  config.standardize_slices = opt.standardize;
  config.em.max_iters = opt.em_max_iters;
  config.em.rel_tol = opt.em_rel_tol;
  config.em.restarts = opt.em_restarts;
  config.em.variance_floor_scale = opt.em_floor_scale;

  PointSet points = load_pointset_csv(opt.input);
  Descriptor descriptor = emperor_descriptor(points, config, opt.threads);
  save_descriptor(opt.output, descriptor);
  for (const std::string& w : descriptor.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  if (!opt.flat_output.empty()) {
    Eigen::VectorXd flat = flatten(descriptor);
    std::string row;
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
      if (i) row += ',';
      row += format_double(flat[i], opt.precision);
    }
    row += '\n';
    atomic_write_text(opt.flat_output, row);
  }
  std::cout << "wrote descriptor (" << descriptor.slice_count()
            << " slices x " << descriptor.components()
            << " components) to " << opt.output << '\n';
  return 0;
}

int run_reconstruct(const ReconstructOptions& opt) {
  Descriptor descriptor = load_descriptor(opt.descriptor);
  std::optional<double> ridge;
  if (opt.ridge >= 0.0) ridge = opt.ridge;
  SolveResult solved = recover_moments(descriptor, opt.degree, ridge);
  emit(opt.output, moment_vector_csv(solved.moments, opt.precision));
  std::cerr << "residual_norm=" << format_double(solved.residual_norm)
            << '\n';
  return 0;
}

int run_moments(const MomentOptions& opt) {
  MultivariateGMM gmm = load_gmm_spec(opt.gmm);

  if (!opt.alpha.empty()) {
    std::vector<int> exponents = parse_int_list(opt.alpha, "--alpha");
    MultiIndex alpha{exponents};
    const double value =
        multivariate_gmm_moment(gmm, alpha, opt.degree_cap);
    emit(opt.output, format_double(value, opt.precision) + "\n");
    return 0;
  }

  if (!opt.theta.empty()) {
    std::vector<double> dir = parse_double_list(opt.theta, "--theta");
    Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(
        dir.data(), static_cast<Eigen::Index>(dir.size()));
    const double norm = theta.norm();
    if (!(norm > 0.0)) {
      fail(ErrorCode::NonUnitDirection, "--theta must be nonzero");
    }
    theta /= norm;

    if (opt.hankel >= 0) {
      std::vector<double> seq(static_cast<std::size_t>(2 * opt.hankel) + 1);
      for (int n = 0; n <= 2 * opt.hankel; ++n) {
        seq[static_cast<std::size_t>(n)] = sliced_gmm_moment(gmm, theta, n);
      }
      HankelReport report =
          hankel_psd_check(MomentSequence{seq}, opt.hankel);
      std::cout << (report.is_psd ? "psd" : "not-psd")
                << " min_eigenvalue="
                << format_double(report.min_eigenvalue, opt.precision)
                << '\n';
      return 0;
    }
    if (opt.carleman >= 0) {
      std::vector<double> evens(static_cast<std::size_t>(opt.carleman));
      for (int k = 1; k <= opt.carleman; ++k) {
        evens[static_cast<std::size_t>(k - 1)] =
            sliced_gmm_moment(gmm, theta, 2 * k);
      }
      const double sum = carleman_partial_sum(evens, opt.carleman);
      emit(opt.output, format_double(sum, opt.precision) + "\n");
      return 0;
    }
    if (opt.degree < 0) {
      fail(ErrorCode::InvalidArgument,
           "--theta needs --degree, --hankel, or --carleman");
    }
    const double value = sliced_gmm_moment(gmm, theta, opt.degree);
    emit(opt.output, format_double(value, opt.precision) + "\n");
    return 0;
  }

  if (opt.degree >= 0) {
    MomentVector moments =
        multivariate_moment_vector(gmm, opt.degree, opt.degree_cap);
    emit(opt.output, moment_vector_csv(moments, opt.precision));
    return 0;
  }

  fail(ErrorCode::InvalidArgument,
       "moments needs --alpha, --degree, or --theta");
}

int run_rates(const RatesOptions& opt) {
  nlohmann::json j = nlohmann::json::parse(read_text_file(opt.config),
                                           nullptr, false);
  if (j.is_discarded()) {
    fail(ErrorCode::ParseError, opt.config + ": invalid JSON");
  }
  RateStudyConfig config = rate_config_from_json(j);
  RateStudyResult result = rate_study(config, opt.threads);
  emit(opt.output, rate_study_csv(result, opt.precision));
  if (!opt.summary.empty()) {
    atomic_write_text(opt.summary,
                      rate_study_summary_json(result).dump(2) + "\n");
  }
  std::cout << "fitted_log_slope="
            << format_double(result.fitted_log_slope) << '\n';
  return 0;
}

int run_bench(const BenchOptions& opt) {
  nlohmann::json j = nlohmann::json::parse(read_text_file(opt.config),
                                           nullptr, false);
  if (j.is_discarded()) {
    fail(ErrorCode::ParseError, opt.config + ": invalid JSON");
  }
  BenchmarkConfig config = bench_config_from_json(j);
  BenchmarkReport report = run_benchmark(config, opt.threads);
  if (!opt.output.empty()) {
    atomic_write_text(opt.output, benchmark_csv(report, opt.precision));
  }
  std::cout << format_benchmark_table(report);
  return 0;
}

int run_directions(const DirectionsOptions& opt) {
  SliceSet slices = generate_directions(opt.dim, opt.count, opt.seed,
                                        scheme_from_name(opt.scheme));
  emit(opt.output, directions_csv(slices, opt.precision));
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{
      "Sliced mixture-moment descriptors for point sets: project onto "
      "random directions, fit per-slice Gaussian mixtures, and recover "
      "multivariate moments"};
  app.require_subcommand(1);

  DescribeOptions describe;
  auto* cmd_describe = app.add_subcommand(
      "describe", "Fit a descriptor to a CSV point set");
  cmd_describe->add_option("--input", describe.input, "point set CSV")
      ->required();
  cmd_describe->add_option("--output", describe.output, "descriptor JSON")
      ->required();
  cmd_describe->add_option("--flat", describe.flat_output,
                           "also write the flattened feature row (CSV)");
  cmd_describe->add_option("--slices", describe.slices, "projection count")
      ->check(CLI::PositiveNumber);
  cmd_describe
      ->add_option("--components", describe.components,
                   "mixture components per slice")
      ->check(CLI::PositiveNumber);
  cmd_describe->add_option("--seed", describe.seed, "descriptor seed");
  cmd_describe->add_option("--scheme", describe.scheme,
                           "direction scheme (iid_gaussian_normalized | "
                           "axis_aligned_then_random)");
  cmd_describe->add_flag("--standardize", describe.standardize,
                         "center/scale each projection before fitting");
  cmd_describe
      ->add_option("--em-max-iters", describe.em_max_iters, "EM iteration cap")
      ->check(CLI::PositiveNumber);
  cmd_describe->add_option("--em-rel-tol", describe.em_rel_tol,
                           "EM convergence tolerance");
  cmd_describe
      ->add_option("--em-restarts", describe.em_restarts, "EM restarts")
      ->check(CLI::PositiveNumber);
  cmd_describe->add_option("--em-floor-scale", describe.em_floor_scale,
                           "variance floor as a fraction of sample variance");
  cmd_describe->add_option("--threads", describe.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd_describe->add_option("--precision", describe.precision,
                           "significant digits for --flat (default: exact)");

  ReconstructOptions reconstruct;
  auto* cmd_reconstruct = app.add_subcommand(
      "reconstruct", "Recover multivariate moments from a descriptor");
  cmd_reconstruct
      ->add_option("--descriptor", reconstruct.descriptor, "descriptor JSON")
      ->required();
  cmd_reconstruct->add_option("--degree", reconstruct.degree, "moment degree")
      ->required()
      ->check(CLI::NonNegativeNumber);
  cmd_reconstruct->add_option(
      "--ridge", reconstruct.ridge,
      "ridge strength; negative picks automatically (default)");
  cmd_reconstruct->add_option("--output", reconstruct.output,
                              "moment CSV (stdout when omitted)");
  cmd_reconstruct->add_option("--precision", reconstruct.precision,
                              "significant digits (default: exact)");

  MomentOptions moments;
  auto* cmd_moments = app.add_subcommand(
      "moments", "Exact moments and diagnostics of a mixture spec");
  cmd_moments->add_option("--gmm", moments.gmm, "mixture spec JSON")
      ->required();
  cmd_moments->add_option("--alpha", moments.alpha,
                          "multi-index, e.g. 2,1,0: one mixed moment");
  cmd_moments->add_option("--degree", moments.degree,
                          "all moments of this total degree (or the sliced "
                          "moment when --theta is given)");
  cmd_moments->add_option("--theta", moments.theta,
                          "direction, e.g. 1,0,0 (normalized internally)");
  cmd_moments->add_option("--hankel", moments.hankel,
                          "check the order-n sliced moment matrix for "
                          "positive semidefiniteness (needs --theta)");
  cmd_moments->add_option("--carleman", moments.carleman,
                          "sliced divergence partial sum with this many "
                          "terms (needs --theta)");
  cmd_moments->add_option("--degree-cap", moments.degree_cap,
                          "refuse degrees above this cap");
  cmd_moments->add_option("--output", moments.output,
                          "output path (stdout when omitted)");
  cmd_moments->add_option("--precision", moments.precision,
                          "significant digits (default: exact)");

  RatesOptions rates;
  auto* cmd_rates = app.add_subcommand(
      "rates", "Recovery-error scaling study against slice count");
  cmd_rates->add_option("--config", rates.config, "study config JSON")
      ->required();
  cmd_rates->add_option("--output", rates.output,
                        "per-trial CSV (stdout when omitted)");
  cmd_rates->add_option("--summary", rates.summary, "summary JSON path");
  cmd_rates->add_option("--threads", rates.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd_rates->add_option("--precision", rates.precision,
                        "significant digits (default: exact)");

  BenchOptions bench;
  auto* cmd_bench = app.add_subcommand(
      "bench", "Moment-matched two-class benchmark of poolings vs the "
               "descriptor");
  cmd_bench->add_option("--config", bench.config, "benchmark config JSON")
      ->required();
  cmd_bench->add_option("--output", bench.output, "per-seed CSV");
  cmd_bench->add_option("--threads", bench.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd_bench->add_option("--precision", bench.precision,
                        "significant digits (default: exact)");

  DirectionsOptions directions;
  auto* cmd_directions = app.add_subcommand(
      "directions", "Emit a reproducible direction set");
  cmd_directions->add_option("--dim", directions.dim, "ambient dimension")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_directions->add_option("--count", directions.count, "direction count")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_directions->add_option("--seed", directions.seed, "seed");
  cmd_directions->add_option("--scheme", directions.scheme,
                             "direction scheme");
  cmd_directions->add_option("--output", directions.output,
                             "CSV path (stdout when omitted)");
  cmd_directions->add_option("--precision", directions.precision,
                             "significant digits (default: exact)");

  try {
    // CLI11's vector overload consumes the arguments back to front.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_describe->parsed()) return run_describe(describe);
    if (cmd_reconstruct->parsed()) return run_reconstruct(reconstruct);
    if (cmd_moments->parsed()) return run_moments(moments);
    if (cmd_rates->parsed()) return run_rates(rates);
    if (cmd_bench->parsed()) return run_bench(bench);
    if (cmd_directions->parsed()) return run_directions(directions);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace emperor
