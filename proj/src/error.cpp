#include "supertoroid/error.hpp"

namespace supertoroid {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateMeanSuperellipse: return "DegenerateMeanSuperellipse";
    case ErrorCode::OnAxis: return "OnAxis";
    case ErrorCode::OnMeanSuperellipse: return "OnMeanSuperellipse";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::SeamSingularity: return "SeamSingularity";
    case ErrorCode::CuspPoint: return "CuspPoint";
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::MissingNormals: return "MissingNormals";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::OptimizerFailure: return "OptimizerFailure";
    case ErrorCode::AllStartsFailed: return "AllStartsFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace supertoroid
