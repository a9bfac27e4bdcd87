#pragma once

#include <string>

#include "emperor/bench.hpp"
#include "emperor/descriptor.hpp"
#include "emperor/model.hpp"
#include "emperor/moments.hpp"
#include "emperor/reconstruct.hpp"

#include <json.hpp>

namespace emperor {

/// Formats a double for text output. precision < 0 selects the shortest
/// representation that parses back to the same bits (the default everywhere,
/// which is what makes repeated runs byte-identical); precision >= 0 rounds
/// to that many significant digits.
std::string format_double(double value, int precision = -1);

/// Writes through a sibling temp file and renames it into place, so readers
/// never observe a half-written file.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

// Mixture model spec: {"weights": [...], "means": [[...]...],
// "covariances": [[[...]...]...]}.
MultivariateGMM gmm_from_json(const nlohmann::json& spec);
nlohmann::json gmm_to_json(const MultivariateGMM& gmm);
MultivariateGMM load_gmm_spec(const std::string& path);
void save_gmm_spec(const std::string& path, const MultivariateGMM& gmm);

// Point sets as CSV, one row per point; '#' lines and blank lines are
// skipped on read.
PointSet load_pointset_csv(const std::string& path);
void save_pointset_csv(const std::string& path, const PointSet& points,
                       int precision = -1);

nlohmann::json descriptor_to_json(const Descriptor& descriptor);
Descriptor descriptor_from_json(const nlohmann::json& j);
Descriptor load_descriptor(const std::string& path);
void save_descriptor(const std::string& path, const Descriptor& descriptor);

std::string moment_vector_csv(const MomentVector& moments,
                              int precision = -1);
std::string rate_study_csv(const RateStudyResult& result,
                           int precision = -1);
nlohmann::json rate_study_summary_json(const RateStudyResult& result);
std::string benchmark_csv(const BenchmarkReport& report, int precision = -1);
std::string directions_csv(const SliceSet& slices, int precision = -1);

RateStudyConfig rate_config_from_json(const nlohmann::json& j);
BenchmarkConfig bench_config_from_json(const nlohmann::json& j);

const char* scheme_name(DirectionScheme scheme);
DirectionScheme scheme_from_name(const std::string& name);

}  // namespace emperor
