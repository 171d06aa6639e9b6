#pragma once

// JSON fit reports. See README.md for the schema.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "supertoroid/fitting.hpp"

namespace supertoroid {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "supertoroid.fit_report/1";

/// Environment variable naming a FitConfig JSON file used as the default.
inline constexpr const char* kConfigEnvVar = "SUPERTOROID_CONFIG";

struct BenchmarkSummary {
  int good = 0;
  int decent = 0;
  int bad = 0;
  double mean_t_stage1 = 0.0;
  double mean_t_stage2 = 0.0;
  double mean_t_total = 0.0;
  /// Sample standard deviation of t_total.
  double std_t_total = 0.0;
};

/// Mean and sample standard deviation, summed in index order.
double mean_of(const std::vector<double>& v);
double sample_std_of(const std::vector<double>& v);

BenchmarkSummary summarize(const std::vector<FitReport>& runs);

struct FitReportDocument {
  std::string schema_version = kReportSchema;
  std::string input_path;
  std::size_t point_count = 0;
  FitConfig config;
  /// One entry for `fit`, one per seed for `benchmark`.
  std::vector<FitReport> runs;
  std::vector<std::uint64_t> run_seeds;
};

Json to_json(const Intrinsicsd& i);
Json to_json(const Modeld& m);
Json to_json(const FitConfig& cfg);
Json to_json(const FitReport& r, bool include_timing = true);
Json to_json(const BenchmarkSummary& s, bool include_timing = true);
Json to_json(const FitReportDocument& doc, bool include_timing = true);

Intrinsicsd intrinsics_from_json(const Json& j);
Modeld model_from_json(const Json& j);
/// Keys missing from `j` keep the values of `base`.
FitConfig config_from_json(const Json& j, const FitConfig& base = {});
FitReport report_from_json(const Json& j);
FitReportDocument document_from_json(const Json& j);

std::string dump(const Json& j);
/// Throws ParseError on malformed JSON and IoError when unreadable.
Json load_json_file(const std::string& path);
Json parse_json(const std::string& text);

}  // namespace supertoroid
