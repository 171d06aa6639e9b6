#pragma once

#include <stdexcept>
#include <string>

namespace supertoroid {

enum class ErrorCode {
  DegenerateMeanSuperellipse,
  OnAxis,
  OnMeanSuperellipse,
  EmptyCloud,
  SeamSingularity,
  CuspPoint,
  DegenerateMetric,
  MissingNormals,
  EmptyResult,
  TooFewPoints,
  OptimizerFailure,
  AllStartsFailed,
  ParseError,
  UnsupportedFormat,
  IoError,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the cloud readers; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace supertoroid
