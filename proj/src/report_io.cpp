#include "supertoroid/report_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace supertoroid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Non-finite numbers serialize as null; null reads back as +inf.
double number_or_inf(const Json& j) { return j.is_null() ? kInf : j.get<double>(); }

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json vec_to_json(const Vec3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3d vec_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::ParseError, "expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

BenchmarkSummary summarize(const std::vector<FitReport>& runs) {
  BenchmarkSummary s;
  std::vector<double> t1, t2, tt;
  for (const auto& r : runs) {
    switch (r.quality) {
      case FitQuality::Good: ++s.good; break;
      case FitQuality::Decent: ++s.decent; break;
      case FitQuality::Bad: ++s.bad; break;
    }
    t1.push_back(r.t_stage1);
    t2.push_back(r.t_stage2);
    tt.push_back(r.t_total);
  }
  s.mean_t_stage1 = mean_of(t1);
  s.mean_t_stage2 = mean_of(t2);
  s.mean_t_total = mean_of(tt);
  s.std_t_total = sample_std_of(tt);
  return s;
}

Json to_json(const Intrinsicsd& i) {
  return Json{{"a1", i.a1}, {"a2", i.a2}, {"a3", i.a3},
              {"a4", i.a4}, {"eps1", i.eps1}, {"eps2", i.eps2}};
}

Json to_json(const Modeld& m) {
  const auto& q = m.pose.orientation;
  return Json{{"intrinsics", to_json(m.intrinsics)},
              {"pose",
               {{"translation", vec_to_json(m.pose.translation)},
                {"quaternion", Json::array({q.w(), q.x(), q.y(), q.z()})}}}};
}

Json to_json(const FitConfig& cfg) {
  Json starts = Json::array();
  for (const auto& a : cfg.axis_starts) starts.push_back(vec_to_json(a));
  return Json{
      {"stage1_points", cfg.stage1_points},
      {"stage2_points", cfg.stage2_points},
      {"seed", cfg.seed},
      {"eps_min", cfg.eps_bounds.lo},
      {"eps_max", cfg.eps_bounds.hi},
      {"a4_lambda", cfg.a4_lambda},
      {"a4_lambda_auto", cfg.a4_lambda_auto},
      {"a4_min", cfg.a4_min},
      {"a4_max", cfg.a4_max},
      {"a3_init", cfg.a3_init ? Json(*cfg.a3_init) : Json(nullptr)},
      {"max_iters_stage1", cfg.max_iters_stage1},
      {"max_iters_stage2", cfg.max_iters_stage2},
      {"convergence_tol", cfg.convergence_tol},
      {"axis_starts", starts},
      {"stage1_exponent", cfg.stage1_exponent == Stage1Exponent::Eps2 ? "eps2" : "eps1"},
      {"volume_weighting", cfg.volume_weighting},
      {"refine_all_starts", cfg.refine_all_starts},
      {"inlier_tau_rel", cfg.inlier_tau_rel},
  };
}

Json to_json(const FitReport& r, bool include_timing) {
  Json costs = Json::array();
  for (double c : r.stage1_start_costs) costs.push_back(number_or_null(c));
  Json j{
      {"model", to_json(r.model)},
      {"stage1_cost", number_or_null(r.stage1_cost)},
      {"stage2_cost", number_or_null(r.stage2_cost)},
      {"stage1_start_costs", costs},
      {"winning_start", r.winning_start},
      {"rms_residual", r.rms_residual},
      {"inlier_fraction", r.inlier_fraction},
      {"inlier_tau", r.inlier_tau},
      {"iterations_stage1", r.iterations_stage1},
      {"iterations_stage2", r.iterations_stage2},
  };
  if (include_timing) {
    j["t_stage1"] = r.t_stage1;
    j["t_stage2"] = r.t_stage2;
    j["t_total"] = r.t_total;
  }
  j["degenerate_point_count"] = r.degenerate_point_count;
  j["a4_lambda_used"] = r.a4_lambda_used;
  j["stage1_skipped"] = r.stage1_skipped;
  j["converged"] = r.converged;
  j["quality"] = to_string(r.quality);
  return j;
}

Json to_json(const BenchmarkSummary& s, bool include_timing) {
  Json j{{"good", s.good}, {"decent", s.decent}, {"bad", s.bad}};
  if (include_timing) {
    j["t_stage1_mean"] = s.mean_t_stage1;
    j["t_stage2_mean"] = s.mean_t_stage2;
    j["t_total_mean"] = s.mean_t_total;
    j["t_total_std"] = s.std_t_total;
  }
  return j;
}

Json to_json(const FitReportDocument& doc, bool include_timing) {
  Json j{{"schema_version", doc.schema_version},
         {"input", {{"path", doc.input_path}, {"point_count", doc.point_count}}},
         {"config", to_json(doc.config)}};
  if (doc.runs.size() == 1 && doc.run_seeds.empty()) {
    j["result"] = to_json(doc.runs.front(), include_timing);
    return j;
  }
  Json runs = Json::array();
  for (std::size_t k = 0; k < doc.runs.size(); ++k) {
    Json r = to_json(doc.runs[k], include_timing);
    r["seed"] = k < doc.run_seeds.size() ? doc.run_seeds[k] : 0;
    runs.push_back(r);
  }
  j["runs"] = runs;
  j["summary"] = to_json(summarize(doc.runs), include_timing);
  return j;
}

Intrinsicsd intrinsics_from_json(const Json& j) {
  try {
    return {j.at("a1").get<double>(), j.at("a2").get<double>(), j.at("a3").get<double>(),
            j.at("a4").get<double>(), j.at("eps1").get<double>(), j.at("eps2").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("intrinsics: ") + e.what());
  }
}

Modeld model_from_json(const Json& j) {
  try {
    Modeld m;
    m.intrinsics = intrinsics_from_json(j.at("intrinsics"));
    const Json& pose = j.at("pose");
    m.pose.translation = vec_from_json(pose.at("translation"));
    const Json& q = pose.at("quaternion");
    if (!q.is_array() || q.size() != 4) throw Error(ErrorCode::ParseError, "expected [w, x, y, z]");
    m.pose.orientation = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(),
                                            q[2].get<double>(), q[3].get<double>());
    if (!(m.pose.orientation.norm() > 0.0)) throw Error(ErrorCode::ParseError, "zero quaternion");
    m.pose.orientation.normalize();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model: ") + e.what());
  }
}

FitConfig config_from_json(const Json& j, const FitConfig& base) {
  FitConfig cfg = base;
  try {
    read_if(j, "stage1_points", cfg.stage1_points);
    read_if(j, "stage2_points", cfg.stage2_points);
    read_if(j, "seed", cfg.seed);
    read_if(j, "eps_min", cfg.eps_bounds.lo);
    read_if(j, "eps_max", cfg.eps_bounds.hi);
    read_if(j, "a4_lambda", cfg.a4_lambda);
    read_if(j, "a4_lambda_auto", cfg.a4_lambda_auto);
    read_if(j, "a4_min", cfg.a4_min);
    read_if(j, "a4_max", cfg.a4_max);
    if (j.contains("a3_init")) {
      const Json& a3 = j.at("a3_init");
      cfg.a3_init = a3.is_null() ? std::nullopt : std::optional<double>(a3.get<double>());
    }
    read_if(j, "max_iters_stage1", cfg.max_iters_stage1);
    read_if(j, "max_iters_stage2", cfg.max_iters_stage2);
    read_if(j, "convergence_tol", cfg.convergence_tol);
    if (j.contains("axis_starts")) {
      cfg.axis_starts.clear();
      for (const auto& a : j.at("axis_starts")) cfg.axis_starts.push_back(vec_from_json(a));
    }
    if (j.contains("stage1_exponent")) {
      const auto s = j.at("stage1_exponent").get<std::string>();
      if (s == "eps2") {
        cfg.stage1_exponent = Stage1Exponent::Eps2;
      } else if (s == "eps1") {
        cfg.stage1_exponent = Stage1Exponent::Eps1;
      } else {
        throw Error(ErrorCode::ParseError, "stage1_exponent must be eps1 or eps2");
      }
    }
    read_if(j, "volume_weighting", cfg.volume_weighting);
    read_if(j, "refine_all_starts", cfg.refine_all_starts);
    read_if(j, "inlier_tau_rel", cfg.inlier_tau_rel);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  return cfg;
}

FitReport report_from_json(const Json& j) {
  try {
    FitReport r;
    r.model = model_from_json(j.at("model"));
    r.stage1_cost = number_or_inf(j.at("stage1_cost"));
    r.stage2_cost = number_or_inf(j.at("stage2_cost"));
    for (const auto& c : j.at("stage1_start_costs")) r.stage1_start_costs.push_back(number_or_inf(c));
    r.winning_start = j.at("winning_start").get<int>();
    r.rms_residual = number_or_inf(j.at("rms_residual"));
    r.inlier_fraction = j.at("inlier_fraction").get<double>();
    r.inlier_tau = j.at("inlier_tau").get<double>();
    r.iterations_stage1 = j.at("iterations_stage1").get<int>();
    r.iterations_stage2 = j.at("iterations_stage2").get<int>();
    read_if(j, "t_stage1", r.t_stage1);
    read_if(j, "t_stage2", r.t_stage2);
    read_if(j, "t_total", r.t_total);
    r.degenerate_point_count = j.at("degenerate_point_count").get<int>();
    r.a4_lambda_used = j.at("a4_lambda_used").get<double>();
    r.stage1_skipped = j.at("stage1_skipped").get<bool>();
    r.converged = j.at("converged").get<bool>();
    const auto q = j.at("quality").get<std::string>();
    r.quality = q == "good" ? FitQuality::Good : q == "decent" ? FitQuality::Decent : FitQuality::Bad;
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("report: ") + e.what());
  }
}

FitReportDocument document_from_json(const Json& j) {
  try {
    FitReportDocument doc;
    doc.schema_version = j.at("schema_version").get<std::string>();
    if (doc.schema_version != kReportSchema) {
      throw Error(ErrorCode::UnsupportedFormat, "schema " + doc.schema_version);
    }
    doc.input_path = j.at("input").at("path").get<std::string>();
    doc.point_count = j.at("input").at("point_count").get<std::size_t>();
    doc.config = config_from_json(j.at("config"));
    if (j.contains("result")) {
      doc.runs.push_back(report_from_json(j.at("result")));
    } else {
      for (const auto& r : j.at("runs")) {
        doc.runs.push_back(report_from_json(r));
        doc.run_seeds.push_back(r.at("seed").get<std::uint64_t>());
      }
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("document: ") + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

}  // namespace supertoroid
