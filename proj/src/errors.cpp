#include "emperor/errors.hpp"

namespace emperor {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return "invalid_argument";
    case ErrorCode::WeightSum:
      return "weight_sum";
    case ErrorCode::NonPositiveWeight:
      return "non_positive_weight";
    case ErrorCode::AsymmetricCovariance:
      return "asymmetric_covariance";
    case ErrorCode::NonPDCovariance:
      return "non_pd_covariance";
    case ErrorCode::RaggedRows:
      return "ragged_rows";
    case ErrorCode::NonFiniteEntry:
      return "non_finite_entry";
    case ErrorCode::EmptyInput:
      return "empty_input";
    case ErrorCode::DimensionMismatch:
      return "dimension_mismatch";
    case ErrorCode::NonUnitDirection:
      return "non_unit_direction";
    case ErrorCode::InsufficientMoments:
      return "insufficient_moments";
    case ErrorCode::NonPositiveEvenMoment:
      return "non_positive_even_moment";
    case ErrorCode::DegreeCapExceeded:
      return "degree_cap_exceeded";
    case ErrorCode::Overflow:
      return "overflow";
    case ErrorCode::RankDeficient:
      return "rank_deficient";
    case ErrorCode::TooFewSamples:
      return "too_few_samples";
    case ErrorCode::WidthMismatch:
      return "width_mismatch";
    case ErrorCode::IoError:
      return "io_error";
    case ErrorCode::ParseError:
      return "parse_error";
  }
  return "unknown";
}

}  // namespace emperor
