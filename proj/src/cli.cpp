#include "supertoroid/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "supertoroid/cloud_io.hpp"
#include "supertoroid/diffgeo.hpp"
#include "supertoroid/fitting.hpp"
#include "supertoroid/meridian.hpp"
#include "supertoroid/report_io.hpp"
#include "supertoroid/synthcloud.hpp"

namespace supertoroid {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, std::size_t n, const char* flag,
                               char sep = ',') {
  std::vector<double> v;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(sep, start), text.size());
    double x = 0.0;
    const char* b = text.data() + start;
    const char* e = text.data() + end;
    const auto [ptr, ec] = std::from_chars(b, e, x);
    if (ec != std::errc() || ptr != e || !std::isfinite(x)) {
      throw UsageError(std::string(flag) + ": cannot parse '" + text + "'");
    }
    v.push_back(x);
    start = end + 1;
  }
  if (v.size() != n) {
    throw UsageError(std::string(flag) + ": expected " + std::to_string(n) + " values");
  }
  return v;
}

Vec3d parse_vec3(const std::string& text, const char* flag) {
  const auto v = parse_list(text, 3, flag);
  return {v[0], v[1], v[2]};
}

Json vec_json(const Vec3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

const char* degeneracy_name(Degeneracy d) {
  switch (d) {
    case Degeneracy::None: return "none";
    case Degeneracy::OnAxis: return "on_axis";
    case Degeneracy::OnCenterline: return "on_centerline";
  }
  return "none";
}

struct ShapeFlags {
  std::string a = "1,1,1";
  double a4 = 2.0;
  std::string eps = "1,1";

  void add(CLI::App* app) {
    app->add_option("--a", a, "a1,a2,a3 half-extents");
    app->add_option("--a4", a4, "hole parameter (> 1 for a ring)");
    app->add_option("--eps", eps, "eps1,eps2 exponents");
  }

  Intrinsicsd intrinsics() const {
    const auto av = parse_list(a, 3, "--a");
    const auto ev = parse_list(eps, 2, "--eps");
    Intrinsicsd i{av[0], av[1], av[2], a4, ev[0], ev[1]};
    try {
      validate(i, ExponentBounds<double>{1e-3, 1e3});
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return i;
  }
};

struct ConfigFlags {
  std::optional<std::string> config_path;
  std::optional<int> stage1_points, stage2_points;
  std::optional<double> a4_lambda, a4_min, a4_max, a3_init;
  bool partial = false;
  bool refine_all = false;
  std::optional<std::string> stage1_exponent;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "FitConfig JSON file");
    app->add_option("--stage1-points", stage1_points, "stage-1 downsample size");
    app->add_option("--stage2-points", stage2_points, "stage-2 downsample size");
    app->add_option("--a4-lambda", a4_lambda, "weight of the a4-maximizing term");
    app->add_flag("--partial", partial, "calibrate the a4 term for single-view clouds");
    app->add_flag("--refine-all-starts", refine_all, "run stage 2 from every stage-1 start");
    app->add_option("--a4-min", a4_min, "lower bound on a4");
    app->add_option("--a4-max", a4_max, "upper bound on a4");
    app->add_option("--a3-init", a3_init, "initial a3 (cross-section height)");
    app->add_option("--stage1-exponent", stage1_exponent, "eps2 (default) or eps1");
  }

  // Defaults, then $SUPERTOROID_CONFIG, then --config, then individual flags.
  FitConfig resolve() const {
    FitConfig cfg;
    if (const char* env = std::getenv(kConfigEnvVar); env && *env) {
      cfg = config_from_json(load_json_file(env), cfg);
    }
    if (config_path) cfg = config_from_json(load_json_file(*config_path), cfg);
    if (stage1_points) cfg.stage1_points = *stage1_points;
    if (stage2_points) cfg.stage2_points = *stage2_points;
    if (a4_lambda) cfg.a4_lambda = *a4_lambda;
    if (partial) cfg.a4_lambda_auto = true;
    if (refine_all) cfg.refine_all_starts = true;
    if (a4_min) cfg.a4_min = *a4_min;
    if (a4_max) cfg.a4_max = *a4_max;
    if (a3_init) cfg.a3_init = *a3_init;
    if (stage1_exponent) {
      if (*stage1_exponent == "eps2") {
        cfg.stage1_exponent = Stage1Exponent::Eps2;
      } else if (*stage1_exponent == "eps1") {
        cfg.stage1_exponent = Stage1Exponent::Eps1;
      } else {
        throw UsageError("--stage1-exponent must be eps1 or eps2");
      }
    }
    try {
      cfg.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

Modeld load_model(const std::string& path) {
  const Json j = load_json_file(path);
  if (j.contains("result")) return model_from_json(j.at("result").at("model"));
  if (j.contains("model")) return model_from_json(j.at("model"));
  return model_from_json(j);
}

void write_text(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
  if (!path) {
    out << text;
    return;
  }
  std::ofstream f(*path);
  if (!f) throw Error(ErrorCode::IoError, "cannot write '" + *path + "'");
  f << text;
  if (!f) throw Error(ErrorCode::IoError, "write failed for '" + *path + "'");
}

std::optional<CloudFormat> parse_format(const std::optional<std::string>& name) {
  if (!name) return std::nullopt;
  if (*name == "xyz") return CloudFormat::Xyz;
  if (*name == "ply") return CloudFormat::PlyAscii;
  throw UsageError("--format must be xyz or ply");
}

Json surface_json(const Modeld& m, const SurfaceParamsd& s) {
  const auto& i = m.intrinsics;
  const Eigen::Matrix3d R = m.pose.rotation();
  Json j{{"eta", s.eta}, {"omega", s.omega},
         {"point", vec_json(canonical_to_world(m, param_point(i, s)))}};
  try {
    j["normal"] = vec_json(R * normal(i, s));
  } catch (const Error& e) {
    j["normal"] = nullptr;
    j["normal_error"] = e.what();
  }
  try {
    const auto t = unit_tangents(i, s);
    j["tangent_eta"] = vec_json(R * t.t_eta);
    j["tangent_omega"] = vec_json(R * t.t_omega);
  } catch (const Error& e) {
    j["tangent_error"] = e.what();
  }
  try {
    const auto c = curvature_info(i, s);
    j["curvature"] = {{"k_omega", c.k_omega}, {"k_eta", c.k_eta}, {"k1", c.k1},
                      {"k2", c.k2},           {"mean_H", c.mean_H}, {"gauss_K", c.gauss_K}};
  } catch (const Error& e) {
    j["curvature"] = nullptr;
    j["curvature_error"] = e.what();
  }
  return j;
}

Json point_json(const Modeld& m, const Vec3d& p_world) {
  const auto& i = m.intrinsics;
  const Vec3d pc = world_to_canonical(m, p_world);
  const auto d = meridian_decompose(i, pc);
  const double f = implicit_value(i, pc);
  Json j{{"point", vec_json(p_world)},
         {"canonical", vec_json(pc)},
         {"implicit_value", finite_or_null(f)},
         {"side", to_string(classify(i, pc, 1e-9))},
         {"distance", d.d_s},
         {"signed_distance", d.signed_distance},
         {"beta1", finite_or_null(d.beta1)},
         {"beta2", finite_or_null(d.beta2)},
         {"omega_s", d.omega_s},
         {"degeneracy", degeneracy_name(d.degeneracy)},
         {"surface_point", vec_json(canonical_to_world(m, d.p_s))}};
  j["surface"] = surface_json(m, surface_params_of(i, d.p_s));
  return j;
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string benchmark_table(const FitReportDocument& doc) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-5s %-8s %-8s %-14s %-10s %-10s %-10s\n", "run", "seed",
                "quality", "rms_residual", "t_S1[s]", "t_S2[s]", "t_total[s]");
  os << line;
  for (std::size_t k = 0; k < doc.runs.size(); ++k) {
    const auto& r = doc.runs[k];
    std::snprintf(line, sizeof(line), "%-5zu %-8llu %-8s %-14s %-10s %-10s %-10s\n", k,
                  static_cast<unsigned long long>(doc.run_seeds[k]), to_string(r.quality),
                  format_g(r.rms_residual).c_str(), format_fixed(r.t_stage1, 4).c_str(),
                  format_fixed(r.t_stage2, 4).c_str(), format_fixed(r.t_total, 4).c_str());
    os << line;
  }
  const auto s = summarize(doc.runs);
  os << '\n';
  std::snprintf(line, sizeof(line), "%-6s %-6s %-6s %-10s %-10s %-10s %-10s\n", "G", "D", "B",
                "t_S1", "t_S2", "t_total", "s_total");
  os << line;
  std::snprintf(line, sizeof(line), "%-6d %-6d %-6d %-10s %-10s %-10s %-10s\n", s.good, s.decent,
                s.bad, format_fixed(s.mean_t_stage1, 4).c_str(),
                format_fixed(s.mean_t_stage2, 4).c_str(), format_fixed(s.mean_t_total, 4).c_str(),
                format_fixed(s.std_t_total, 4).c_str());
  os << line;
  return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Supertoroid sampling, fitting and evaluation", "supertoroid"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "sample a supertoroid into a cloud file");
  ShapeFlags gen_shape;
  gen_shape.add(gen);
  std::string gen_n = "64x64", gen_mode = "uniform", gen_out;
  std::optional<std::string> gen_translation, gen_quaternion, gen_camera, gen_look_at, gen_format;
  double gen_noise = 0.0;
  std::uint64_t gen_seed = 0;
  std::optional<std::size_t> gen_downsample;
  gen->add_option("--n", gen_n, "n_eta x n_omega, e.g. 64x64");
  gen->add_option("--mode", gen_mode, "uniform or adaptive")->check(CLI::IsMember({"uniform", "adaptive"}));
  gen->add_option("--translation", gen_translation, "x,y,z");
  gen->add_option("--quaternion", gen_quaternion, "w,x,y,z");
  gen->add_option("--camera", gen_camera, "x,y,z; keep only camera-facing points");
  gen->add_option("--look-at", gen_look_at, "x,y,z (default origin)");
  gen->add_option("--noise", gen_noise, "Gaussian sigma per coordinate")->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", gen_seed, "noise and downsampling seed");
  gen->add_option("--downsample", gen_downsample, "random subset size");
  gen->add_option("--out", gen_out, "output cloud (.xyz or .ply)")->required();
  gen->add_option("--format", gen_format, "xyz or ply (default from extension)");

  // fit
  auto* fitc = app.add_subcommand("fit", "fit a supertoroid to a cloud");
  std::string fit_in;
  std::optional<std::string> fit_out, fit_overlay, fit_prior;
  std::optional<std::uint64_t> fit_seed;
  bool fit_no_timing = false;
  ConfigFlags fit_cfg;
  fitc->add_option("--in", fit_in, "input cloud")->required();
  fitc->add_option("--out", fit_out, "report path (default stdout)");
  fitc->add_option("--overlay", fit_overlay, "PLY with cloud and fitted surface");
  fitc->add_option("--seed", fit_seed, "downsampling seed (overrides the config)");
  fitc->add_option("--prior", fit_prior, "model or report JSON; skips stage 1");
  fitc->add_flag("--no-timing", fit_no_timing, "omit wall-time fields");
  fit_cfg.add(fitc);

  // eval
  auto* ev = app.add_subcommand("eval", "distances, normals and curvatures");
  std::optional<std::string> ev_model, ev_point, ev_cloud, ev_at;
  ShapeFlags ev_shape;
  ev->add_option("--model", ev_model, "model or report JSON");
  ev_shape.add(ev);
  auto* o_point = ev->add_option("--point", ev_point, "x,y,z in world frame");
  auto* o_cloud = ev->add_option("--cloud", ev_cloud, "cloud file");
  auto* o_at = ev->add_option("--at", ev_at, "eta,omega surface parameters");
  o_point->excludes(o_cloud)->excludes(o_at);
  o_cloud->excludes(o_at);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "repeated fits with per-run seeds");
  std::string bench_in;
  int bench_runs = 10;
  std::uint64_t bench_seed_base = 0;
  std::optional<std::string> bench_out;
  bool bench_no_timing = false;
  ConfigFlags bench_cfg;
  bench->add_option("--in", bench_in, "input cloud")->required();
  bench->add_option("--runs", bench_runs, "number of runs")->check(CLI::PositiveNumber);
  bench->add_option("--seed-base", bench_seed_base, "seed of run 0; run k uses seed-base + k");
  bench->add_option("--out", bench_out, "JSON document with all runs");
  bench->add_flag("--no-timing", bench_no_timing, "omit wall-time fields from the JSON");
  bench_cfg.add(bench);

  std::vector<std::string> argv_store{"supertoroid"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (gen->parsed()) {
    Modeld m;
    m.intrinsics = gen_shape.intrinsics();
    if (gen_translation) m.pose.translation = parse_vec3(*gen_translation, "--translation");
    if (gen_quaternion) {
      const auto q = parse_list(*gen_quaternion, 4, "--quaternion");
      m.pose.orientation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);
      if (!(m.pose.orientation.norm() > 0.0)) throw UsageError("--quaternion must be nonzero");
      m.pose.orientation.normalize();
    }
    const auto nn = parse_list(gen_n, 2, "--n", 'x');
    if (nn[0] != std::floor(nn[0]) || nn[1] != std::floor(nn[1])) {
      throw UsageError("--n expects integers, e.g. 64x64");
    }
    const auto mode = gen_mode == "adaptive" ? SamplingMode::ArclengthAdaptive : SamplingMode::UniformAngle;
    PointCloud cloud;
    try {
      cloud = sample_surface(m, static_cast<int>(nn[0]), static_cast<int>(nn[1]), mode);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidArgument) throw UsageError(e.what());
      throw;
    }
    if (gen_camera) {
      CameraView cam;
      cam.position = parse_vec3(*gen_camera, "--camera");
      if (gen_look_at) cam.look_at = parse_vec3(*gen_look_at, "--look-at");
      cloud = partial_view(cloud, cam);
    }
    if (gen_noise > 0.0) cloud = add_noise(cloud, gen_noise, gen_seed);
    if (gen_downsample) cloud = downsample_random(cloud, *gen_downsample, gen_seed);
    write_cloud(cloud, gen_out, parse_format(gen_format));
    out << cloud.size() << " points written to " << gen_out << '\n';
    return kExitOk;
  }

  if (fitc->parsed()) {
    FitConfig cfg = fit_cfg.resolve();
    if (fit_seed) cfg.seed = *fit_seed;
    const PointCloud cloud = read_cloud(fit_in);
    std::optional<Modeld> prior;
    if (fit_prior) prior = load_model(*fit_prior);
    FitReportDocument doc;
    doc.input_path = fit_in;
    doc.point_count = cloud.size();
    doc.config = cfg;
    doc.runs.push_back(fit(cloud, cfg, prior));
    write_text(fit_out, dump(to_json(doc, !fit_no_timing)), out);
    if (fit_overlay) export_fit_overlay(doc.runs.front().model, cloud, *fit_overlay);
    return kExitOk;
  }

  if (ev->parsed()) {
    Modeld m;
    if (ev_model) {
      m = load_model(*ev_model);
    } else {
      m.intrinsics = ev_shape.intrinsics();
    }
    Json j{{"model", to_json(m)}};
    if (ev_point) {
      j["query"] = point_json(m, parse_vec3(*ev_point, "--point"));
    } else if (ev_at) {
      const auto a = parse_list(*ev_at, 2, "--at");
      j["query"] = surface_json(m, SurfaceParamsd(a[0], a[1]));
    } else if (ev_cloud) {
      const PointCloud cloud = read_cloud(*ev_cloud);
      if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "no points in '" + *ev_cloud + "'");
      Json dist = Json::array();
      CompensatedSum<double> sq;
      double max_d = 0.0;
      int degenerate = 0;
      for (const auto& p : cloud.points) {
        const auto d = meridian_decompose(m.intrinsics, world_to_canonical(m, p));
        dist.push_back(d.signed_distance);
        sq.add(d.d_s * d.d_s);
        max_d = std::max(max_d, d.d_s);
        if (d.degenerate()) ++degenerate;
      }
      j["query"] = {{"count", cloud.size()},
                    {"rms_distance", std::sqrt(sq.value() / static_cast<double>(cloud.size()))},
                    {"max_distance", max_d},
                    {"degenerate_point_count", degenerate},
                    {"signed_distances", dist}};
    } else {
      throw UsageError("eval needs one of --point, --cloud, --at");
    }
    out << dump(j);
    return kExitOk;
  }

  if (bench->parsed()) {
    const FitConfig base = bench_cfg.resolve();
    const PointCloud cloud = read_cloud(bench_in);
    FitReportDocument doc;
    doc.input_path = bench_in;
    doc.point_count = cloud.size();
    doc.config = base;
    for (int k = 0; k < bench_runs; ++k) {
      FitConfig cfg = base;
      cfg.seed = bench_seed_base + static_cast<std::uint64_t>(k);
      doc.run_seeds.push_back(cfg.seed);
      doc.runs.push_back(fit(cloud, cfg));
    }
    out << benchmark_table(doc);
    if (bench_out) write_text(bench_out, dump(to_json(doc, !bench_no_timing)), out);
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run(args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::OptimizerFailure:
      case ErrorCode::AllStartsFailed:
        return kExitOptimizer;
      case ErrorCode::InvalidArgument:
        return kExitUsage;
      default:
        return kExitData;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace supertoroid
