#include "emperor/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "emperor/errors.hpp"

namespace emperor {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& where,
                             const std::string& what) {
  fail(ErrorCode::ParseError, where + ": " + what);
}

double json_number(const json& j, const std::string& where) {
  if (!j.is_number()) parse_fail(where, "expected a number");
  return j.get<double>();
}

const json& require_field(const json& j, const char* key,
                          const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) parse_fail(where, std::string("missing field '") + key + "'");
  return *it;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) parse_fail(where, "expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& e : j) {
    v[i++] = json_number(e, where);
  }
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) parse_fail(where, "expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXd m;
  Eigen::Index r = 0;
  for (const auto& row : j) {
    Eigen::VectorXd v = vector_from_json(row, where);
    if (cols < 0) {
      cols = v.size();
      m.resize(rows, cols);
    } else if (v.size() != cols) {
      parse_fail(where, "ragged rows");
    }
    m.row(r++) = v.transpose();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows.push_back(vector_to_json(m.row(r).transpose()));
  }
  return rows;
}

json parse_json_text(const std::string& text, const std::string& where) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) parse_fail(where, "invalid JSON");
  return j;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos
                        ? std::string()
                        : cell.substr(b, e - b + 1));
  }
  return cells;
}

double parse_double(const std::string& token, const std::string& where) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    parse_fail(where, "bad number '" + token + "'");
  }
  return value;
}

EMConfig em_config_from_json(const json& j, const std::string& where) {
  EMConfig em;
  if (auto it = j.find("max_iters"); it != j.end()) em.max_iters = it->get<int>();
  if (auto it = j.find("rel_tol"); it != j.end()) em.rel_tol = json_number(*it, where);
  if (auto it = j.find("restarts"); it != j.end()) em.restarts = it->get<int>();
  if (auto it = j.find("variance_floor_scale"); it != j.end()) {
    em.variance_floor_scale = json_number(*it, where);
  }
  return em;
}

json em_config_to_json(const EMConfig& em) {
  return json{{"max_iters", em.max_iters},
              {"rel_tol", em.rel_tol},
              {"restarts", em.restarts},
              {"variance_floor_scale", em.variance_floor_scale}};
}

DescriptorConfig descriptor_config_from_json(const json& j,
                                             const std::string& where) {
  DescriptorConfig config;
  config.slices = require_field(j, "slices", where).get<int>();
  config.components = require_field(j, "components", where).get<int>();
  config.seed = require_field(j, "seed", where).get<std::uint64_t>();
  config.scheme = scheme_from_name(
      require_field(j, "direction_scheme", where).get<std::string>());
  if (auto it = j.find("standardize_slices"); it != j.end()) {
    config.standardize_slices = it->get<bool>();
  }
  if (auto it = j.find("em"); it != j.end()) {
    config.em = em_config_from_json(*it, where);
  }
  return config;
}

json descriptor_config_to_json(const DescriptorConfig& config) {
  return json{{"slices", config.slices},
              {"components", config.components},
              {"seed", config.seed},
              {"direction_scheme", scheme_name(config.scheme)},
              {"standardize_slices", config.standardize_slices},
              {"em", em_config_to_json(config.em)}};
}

}  // namespace

std::string format_double(double value, int precision) {
  char buffer[64];
  std::to_chars_result res{};
  if (precision < 0) {
    res = std::to_chars(buffer, buffer + sizeof(buffer), value);
  } else {
    res = std::to_chars(buffer, buffer + sizeof(buffer), value,
                        std::chars_format::general, precision);
  }
  return std::string(buffer, res.ptr);
}

void atomic_write_text(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path parent =
      target.has_parent_path() ? target.parent_path() : fs::path(".");
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(parent, ec);  // best effort; open reports failure
  }
  const fs::path tmp = target.string() + ".tmp." +
                       std::to_string(
                           static_cast<unsigned long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      fail(ErrorCode::IoError, "cannot open '" + tmp.string() + "' for writing");
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code rm;
      fs::remove(tmp, rm);
      fail(ErrorCode::IoError, "write to '" + tmp.string() + "' failed");
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code rm;
    fs::remove(tmp, rm);
    fail(ErrorCode::IoError,
         "rename to '" + path + "' failed: " + ec.message());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) fail(ErrorCode::IoError, "read of '" + path + "' failed");
  return buffer.str();
}

MultivariateGMM gmm_from_json(const json& spec) {
  const std::string where = "mixture spec";
  Eigen::VectorXd weights =
      vector_from_json(require_field(spec, "weights", where), where);
  const json& jmeans = require_field(spec, "means", where);
  const json& jcovs = require_field(spec, "covariances", where);
  if (!jmeans.is_array() || !jcovs.is_array()) {
    parse_fail(where, "means/covariances must be arrays");
  }
  std::vector<Eigen::VectorXd> means;
  for (const auto& jm : jmeans) means.push_back(vector_from_json(jm, where));
  std::vector<Eigen::MatrixXd> covs;
  for (const auto& jc : jcovs) covs.push_back(matrix_from_json(jc, where));
  return MultivariateGMM(weights, means, covs);
}

json gmm_to_json(const MultivariateGMM& gmm) {
  json means = json::array();
  json covs = json::array();
  for (int k = 0; k < gmm.components(); ++k) {
    means.push_back(vector_to_json(gmm.means()[static_cast<std::size_t>(k)]));
    covs.push_back(
        matrix_to_json(gmm.covariances()[static_cast<std::size_t>(k)]));
  }
  return json{{"weights", vector_to_json(gmm.weights())},
              {"means", means},
              {"covariances", covs}};
}

MultivariateGMM load_gmm_spec(const std::string& path) {
  return gmm_from_json(parse_json_text(read_text_file(path), path));
}

void save_gmm_spec(const std::string& path, const MultivariateGMM& gmm) {
  atomic_write_text(path, gmm_to_json(gmm).dump(2) + "\n");
}

PointSet load_pointset_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string where = path + ":" + std::to_string(lineno);
    std::vector<double> row;
    for (const std::string& cell : split_csv_line(line)) {
      row.push_back(parse_double(cell, where));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    fail(ErrorCode::EmptyInput, path + ": no data rows");
  }
  return pointset_from_rows(rows);
}

void save_pointset_csv(const std::string& path, const PointSet& points,
                       int precision) {
  std::string out;
  const Eigen::MatrixXd& x = points.points();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (j) out += ',';
      out += format_double(x(i, j), precision);
    }
    out += '\n';
  }
  atomic_write_text(path, out);
}

json descriptor_to_json(const Descriptor& descriptor) {
  json slices = json::array();
  for (const SliceFit& fit : descriptor.per_slice) {
    json weights = json::array();
    json means = json::array();
    json stddevs = json::array();
    for (int j = 0; j < fit.gmm.components(); ++j) {
      weights.push_back(fit.gmm.weights()[j]);
      means.push_back(fit.gmm.means()[j]);
      stddevs.push_back(fit.gmm.stddevs()[j]);
    }
    slices.push_back(json{{"weights", weights},
                          {"means", means},
                          {"stddevs", stddevs},
                          {"center", fit.center},
                          {"scale", fit.scale}});
  }
  return json{{"format", "emperor-descriptor"},
              {"version", 1},
              {"dimension", descriptor.dimension()},
              {"config", descriptor_config_to_json(descriptor.config)},
              {"directions", matrix_to_json(descriptor.slices.directions)},
              {"slices", slices},
              {"warnings", descriptor.warnings}};
}

Descriptor descriptor_from_json(const json& j) {
  const std::string where = "descriptor";
  const std::string fmt =
      require_field(j, "format", where).get<std::string>();
  if (fmt != "emperor-descriptor") {
    parse_fail(where, "unrecognized format tag '" + fmt + "'");
  }
  if (require_field(j, "version", where).get<int>() != 1) {
    parse_fail(where, "unsupported version");
  }
  DescriptorConfig config = descriptor_config_from_json(
      require_field(j, "config", where), where);
  Eigen::MatrixXd directions =
      matrix_from_json(require_field(j, "directions", where), where);
  const int dimension = require_field(j, "dimension", where).get<int>();
  if (directions.cols() != dimension ||
      directions.rows() != config.slices) {
    parse_fail(where, "direction matrix shape disagrees with header");
  }

  SliceSet slices{std::move(directions), config.seed, config.scheme};
  const json& jslices = require_field(j, "slices", where);
  if (!jslices.is_array() ||
      static_cast<int>(jslices.size()) != config.slices) {
    parse_fail(where, "slice list length disagrees with header");
  }

  std::vector<SliceFit> fits;
  fits.reserve(jslices.size());
  for (const auto& js : jslices) {
    Eigen::VectorXd w =
        vector_from_json(require_field(js, "weights", where), where);
    Eigen::VectorXd mu =
        vector_from_json(require_field(js, "means", where), where);
    Eigen::VectorXd sd =
        vector_from_json(require_field(js, "stddevs", where), where);
    if (w.size() != config.components || mu.size() != config.components ||
        sd.size() != config.components) {
      parse_fail(where, "slice component count disagrees with header");
    }
    SliceFit fit{UnivariateGMM(w, mu, sd), 0.0, 1.0};
    if (auto it = js.find("center"); it != js.end()) {
      fit.center = json_number(*it, where);
    }
    if (auto it = js.find("scale"); it != js.end()) {
      fit.scale = json_number(*it, where);
    }
    fits.push_back(std::move(fit));
  }

  Descriptor descriptor{std::move(slices), std::move(fits), config, {}};
  if (auto it = j.find("warnings"); it != j.end()) {
    for (const auto& w : *it) {
      descriptor.warnings.push_back(w.get<std::string>());
    }
  }
  return descriptor;
}

Descriptor load_descriptor(const std::string& path) {
  return descriptor_from_json(parse_json_text(read_text_file(path), path));
}

void save_descriptor(const std::string& path, const Descriptor& descriptor) {
  atomic_write_text(path, descriptor_to_json(descriptor).dump(2) + "\n");
}

std::string moment_vector_csv(const MomentVector& moments, int precision) {
  std::string out = "# ";
  const int d = moments.basis.dimension;
  for (int i = 0; i < d; ++i) {
    out += "alpha" + std::to_string(i) + ",";
  }
  out += "moment\n";
  for (std::size_t a = 0; a < moments.basis.indices.size(); ++a) {
    const MultiIndex& alpha = moments.basis.indices[a];
    for (int i = 0; i < d; ++i) {
      out += std::to_string(alpha.exponents[static_cast<std::size_t>(i)]);
      out += ',';
    }
    out += format_double(moments.values[static_cast<Eigen::Index>(a)],
                         precision);
    out += '\n';
  }
  return out;
}

std::string rate_study_csv(const RateStudyResult& result, int precision) {
  std::string out = "# slice_count,trial,error\n";
  for (const RateTrial& t : result.trials) {
    out += std::to_string(t.slice_count) + "," + std::to_string(t.trial) +
           "," + format_double(t.rmse, precision) + "\n";
  }
  out += "# slice_count,error_mean,error_std\n";
  for (const RateTableRow& row : result.table) {
    out += "# " + std::to_string(row.slice_count) + "," +
           format_double(row.rmse_mean, precision) + "," +
           format_double(row.rmse_std, precision) + "\n";
  }
  out += "# fitted_log_slope=" + format_double(result.fitted_log_slope, precision) +
         " smallest_excluded=" + (result.smallest_excluded ? "1" : "0") +
         " design_lambda_min=" +
         format_double(result.design_lambda_min, precision) + "\n";
  return out;
}

nlohmann::json rate_study_summary_json(const RateStudyResult& result) {
  json table = json::array();
  for (const RateTableRow& row : result.table) {
    table.push_back(json{{"slice_count", row.slice_count},
                         {"error_mean", row.rmse_mean},
                         {"error_std", row.rmse_std}});
  }
  return json{{"table", table},
              {"fitted_log_slope", result.fitted_log_slope},
              {"smallest_excluded", result.smallest_excluded},
              {"design_lambda_min", result.design_lambda_min}};
}

std::string benchmark_csv(const BenchmarkReport& report, int precision) {
  std::string out = "# method,seed,train_accuracy,test_accuracy\n";
  for (const BenchRow& row : report.rows) {
    out += row.method + "," + std::to_string(row.seed) + "," +
           format_double(row.train_accuracy, precision) + "," +
           format_double(row.test_accuracy, precision) + "\n";
  }
  return out;
}

std::string directions_csv(const SliceSet& slices, int precision) {
  std::string out = "# seed=" + std::to_string(slices.seed) +
                    " scheme=" + scheme_name(slices.scheme) + "\n";
  for (Eigen::Index l = 0; l < slices.count(); ++l) {
    for (Eigen::Index j = 0; j < slices.dimension(); ++j) {
      if (j) out += ',';
      out += format_double(slices.directions(l, j), precision);
    }
    out += '\n';
  }
  return out;
}

RateStudyConfig rate_config_from_json(const json& j) {
  const std::string where = "rate study config";
  const json& jg = require_field(j, "gmm", where);
  MultivariateGMM gmm = jg.is_string()
                            ? load_gmm_spec(jg.get<std::string>())
                            : gmm_from_json(jg);
  RateStudyConfig config{std::move(gmm), 2, {}, 50, 1.0, 100.0, 0.0, 0};
  config.degree = require_field(j, "degree", where).get<int>();
  for (const auto& c : require_field(j, "slice_counts", where)) {
    config.slice_counts.push_back(c.get<int>());
  }
  if (auto it = j.find("trials"); it != j.end()) config.trials = it->get<int>();
  if (auto it = j.find("noise_scale"); it != j.end()) {
    config.noise_scale = json_number(*it, where);
  }
  if (auto it = j.find("sample_size"); it != j.end()) {
    config.sample_size = json_number(*it, where);
  }
  if (auto it = j.find("ridge"); it != j.end()) {
    config.ridge = json_number(*it, where);
  }
  if (auto it = j.find("seed"); it != j.end()) {
    config.seed = it->get<std::uint64_t>();
  }
  return config;
}

BenchmarkConfig bench_config_from_json(const json& j) {
  const std::string where = "benchmark config";
  BenchmarkConfig config;
  if (auto it = j.find("dimension"); it != j.end()) config.dimension = it->get<int>();
  if (auto it = j.find("separation"); it != j.end()) {
    config.separation = json_number(*it, where);
  }
  if (auto it = j.find("sets_per_class"); it != j.end()) {
    config.sets_per_class = it->get<int>();
  }
  if (auto it = j.find("points_per_set"); it != j.end()) {
    config.points_per_set = it->get<int>();
  }
  if (auto it = j.find("seeds"); it != j.end()) {
    config.seeds.clear();
    for (const auto& s : *it) config.seeds.push_back(s.get<std::uint64_t>());
  }
  if (auto it = j.find("train_fraction"); it != j.end()) {
    config.train_fraction = json_number(*it, where);
  }

  DescriptorConfig descriptor;
  descriptor.slices = 32;
  descriptor.components = 2;
  if (auto it = j.find("descriptor"); it != j.end()) {
    descriptor = descriptor_config_from_json(*it, where);
  }
  config.methods = default_bench_methods(descriptor);
  return config;
}

const char* scheme_name(DirectionScheme scheme) {
  switch (scheme) {
    case DirectionScheme::IidGaussianNormalized:
      return "iid_gaussian_normalized";
    case DirectionScheme::AxisAlignedThenRandom:
      return "axis_aligned_then_random";
  }
  return "unknown";
}

DirectionScheme scheme_from_name(const std::string& name) {
  if (name == "iid_gaussian_normalized") {
    return DirectionScheme::IidGaussianNormalized;
  }
  if (name == "axis_aligned_then_random") {
    return DirectionScheme::AxisAlignedThenRandom;
  }
  fail(ErrorCode::ParseError, "unknown direction scheme '" + name + "'");
}

}  // namespace emperor
