#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "supertoroid/fitting.hpp"
#include "supertoroid/synthcloud.hpp"

using namespace supertoroid;
using doctest::Approx;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Modeld fixture_model() {
  Modeld m;
  m.intrinsics = {1.0, 0.8, 0.3, 2.5, 0.8, 1.2};
  m.pose.translation = Vec3d(0.4, -0.7, 1.1);
  m.pose.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(0.6, Vec3d(1, -2, 0.5).normalized()));
  return m;
}

PointCloud fixture_cloud(const Modeld& m, double sigma, std::uint64_t seed) {
  return add_noise(sample_surface(m, 48, 48), sigma, seed);
}

double axis_angle(const Modeld& a, const Modeld& b) {
  const double c = std::abs(a.pose.axis().dot(b.pose.axis()));
  return std::acos(std::min(1.0, c));
}

// Smallest parameter discrepancy between `fit` and any parametrization of `truth`.
double best_rel_intrinsics_error(const Modeld& fitted, const Modeld& truth) {
  double best = INFINITY;
  for (const auto& v : symmetry_variants(truth)) {
    const auto& a = fitted.intrinsics;
    const auto& b = v.intrinsics;
    double worst = 0;
    for (auto [x, y] : {std::pair{a.a1, b.a1}, {a.a2, b.a2}, {a.a3, b.a3}, {a.a4, b.a4},
                        {a.eps1, b.eps1}, {a.eps2, b.eps2}}) {
      worst = std::max(worst, std::abs(x - y) / std::abs(y));
    }
    best = std::min(best, worst);
  }
  return best;
}

double rotation_gap(const Modeld& a, const Modeld& b) {
  return a.pose.orientation.angularDistance(b.pose.orientation);
}

bool same_surface(const Modeld& a, const Modeld& b) {
  const PointCloud c = sample_surface(a, 12, 12);
  for (const auto& p : c.points) {
    if (std::abs(implicit_value(b.intrinsics, world_to_canonical(b, p)) - 1.0) > 1e-8) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("config validation") {
  FitConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto bad = [](auto mutate) {
    FitConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), Error);
  };
  bad([](FitConfig& c) { c.stage1_points = 5; });
  bad([](FitConfig& c) { c.a4_min = -1.0; });
  bad([](FitConfig& c) { c.a4_max = c.a4_min; });
  bad([](FitConfig& c) { c.eps_bounds = {2.0, 1.0}; });
  bad([](FitConfig& c) { c.a4_lambda = -1.0; });
  bad([](FitConfig& c) { c.axis_starts.clear(); });
  bad([](FitConfig& c) { c.axis_starts = {Vec3d::Zero()}; });
}

TEST_CASE("grade_fit") {
  CHECK(grade_fit(0.019, 1.0) == FitQuality::Good);
  CHECK(grade_fit(0.03, 1.0) == FitQuality::Decent);
  CHECK(grade_fit(0.06, 1.0) == FitQuality::Bad);
  CHECK(grade_fit(0.03, 2.0) == FitQuality::Good);
  CHECK(std::string(to_string(FitQuality::Decent)) == "decent");
}

TEST_CASE("initial_guess") {
  Modeld m;
  m.intrinsics = {1, 1, 0.5, 3, 1, 1};
  const PointCloud c = sample_surface(m, 32, 32);
  FitConfig cfg;
  const Modeld gx = initial_guess(c, cfg, Vec3d::UnitX());
  const Modeld gy = initial_guess(c, cfg, Vec3d::UnitY());
  const Modeld gz = initial_guess(c, cfg, Vec3d::UnitZ());
  CHECK(gz.pose.translation == c.centroid());
  CHECK(gz.pose.axis().isApprox(Vec3d::UnitZ()));
  CHECK(gx.pose.axis().isApprox(Vec3d::UnitX()));
  CHECK(gy.pose.axis().isApprox(Vec3d::UnitY()));
  CHECK(std::abs(gz.intrinsics.a1 * gz.intrinsics.a4 - 3.0) < 1.5);
  CHECK(gz.intrinsics.eps1 == 1.0);
  CHECK(gz.intrinsics.eps2 == 1.0);

  cfg.a3_init = 0.25;
  CHECK(initial_guess(c, cfg, Vec3d::UnitZ()).intrinsics.a3 == 0.25);

  PointCloud tiny;
  tiny.points.assign(11, Vec3d(1, 2, 3));
  try {
    initial_guess(tiny, cfg, Vec3d::UnitZ());
    FAIL("expected TooFewPoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewPoints);
  }
}

TEST_CASE("stage 1 recovers the hole axis") {
  const Modeld truth = fixture_model();
  const PointCloud c = downsample_random(fixture_cloud(truth, 0.0, 0), 150, 0);
  FitConfig cfg;
  const Modeld init = initial_guess(c, cfg, truth.pose.axis());
  const StageResult r = stage1_fit(c, init, cfg);
  CHECK(r.cost <= stage1_cost(init, c));
  CHECK(axis_angle(r.model, truth) < 5 * kDeg);
  CHECK(r.model.intrinsics.eps1 == init.intrinsics.eps1);
  // a3 and the a1/a4 split are re-derived from the cloud in the fitted frame.
  CHECK(r.model.intrinsics.a3 == Approx(truth.intrinsics.a3).epsilon(0.1));
  CHECK(r.model.intrinsics.a4 == Approx(truth.intrinsics.a4).epsilon(0.2));
  CHECK(stage1_cost(r.model, c) == Approx(r.cost).epsilon(1e-12));

  cfg.a3_init = 0.5;
  const Modeld fixed = initial_guess(c, cfg, truth.pose.axis());
  CHECK(stage1_fit(c, fixed, cfg).model.intrinsics.a3 == 0.5);
}

TEST_CASE("multistart picks the start aligned with the hole") {
  Modeld truth;
  truth.intrinsics = {1, 1, 0.4, 2.5, 1, 1};
  truth.pose = Posed::from_axis(Vec3d(1, 2, 3), Vec3d::UnitY());
  const PointCloud c = downsample_random(sample_surface(truth, 32, 32), 150, 1);
  const MultistartResult r = stage1_multistart(c, FitConfig{});
  REQUIRE(r.start_costs.size() == 3u);
  CHECK(r.best.cost == *std::min_element(r.start_costs.begin(), r.start_costs.end()));
  CHECK(r.start_costs[0] > r.best.cost * 2);
  CHECK(axis_angle(r.best.model, truth) < 5 * kDeg);

  FitConfig xy;
  xy.axis_starts = {Vec3d::UnitX(), Vec3d::UnitY()};
  const MultistartResult rxy = stage1_multistart(c, xy);
  CHECK(rxy.winning_start == 1);
  CHECK(axis_angle(r.best.model, truth) < 5 * kDeg);

  FitConfig twice;
  twice.axis_starts = {Vec3d::UnitY(), Vec3d::UnitY()};
  const MultistartResult t = stage1_multistart(c, twice);
  CHECK(t.start_costs[0] == t.start_costs[1]);
  CHECK(t.winning_start == 0);
}

TEST_CASE("stage 1 is frame covariant") {
  const Modeld truth = fixture_model();
  const PointCloud c = downsample_random(fixture_cloud(truth, 0.01, 3), 150, 0);
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(1.1, Vec3d(0.3, 0.4, -1).normalized()).toRotationMatrix();
  const Vec3d shift(2, -1, 0.5);
  PointCloud moved = c;
  for (auto& p : moved.points) p = rot * p + shift;

  FitConfig cfg;
  const Modeld init = initial_guess(c, cfg, Vec3d(0.2, 0.1, 1));
  Modeld init_moved = init;
  init_moved.pose.translation = rot * init.pose.translation + shift;
  init_moved.pose.orientation = Eigen::Quaterniond(rot) * init.pose.orientation;
  CHECK(stage1_cost(init_moved, moved) == Approx(stage1_cost(init, c)).epsilon(1e-10));

  const StageResult a = stage1_fit(c, init, cfg);
  const StageResult b = stage1_fit(moved, init_moved, cfg);
  CHECK(b.cost == Approx(a.cost).epsilon(1e-8));
  CHECK(axis_angle(b.model, Modeld{a.model.intrinsics,
                                   {rot * a.model.pose.translation + shift,
                                    Eigen::Quaterniond(rot) * a.model.pose.orientation}}) < 1e-4);
}

TEST_CASE("stage 2 from a perturbed truth") {
  const Modeld truth = fixture_model();
  const PointCloud c = downsample_random(fixture_cloud(truth, 0.0, 0), 1000, 0);
  Modeld init = truth;
  auto& in = init.intrinsics;
  in.a1 *= 1.1;
  in.a2 *= 0.9;
  in.a3 *= 1.1;
  in.a4 *= 0.9;
  in.eps1 *= 1.1;
  in.eps2 *= 0.9;
  init.pose.translation += Vec3d(0.05, -0.05, 0.03);

  FitConfig cfg;
  const FitReport r = stage2_fit(c, init, cfg);
  CHECK(r.stage2_cost <= stage2_objective(init, c, 0.0));
  CHECK(best_rel_intrinsics_error(r.model, truth) < 0.01);
  CHECK((r.model.pose.translation - truth.pose.translation).norm() < 0.01 * truth.intrinsics.a1);
  CHECK(axis_angle(r.model, truth) < 1 * kDeg);
  CHECK(r.a4_lambda_used == 0.0);

  // A small a4 reward barely moves a full-cloud fit.
  cfg.a4_lambda = 1e-4;
  const FitReport rl = stage2_fit(c, init, cfg);
  CHECK(rl.a4_lambda_used == 1e-4);
  CHECK(rl.model.intrinsics.a4 == Approx(r.model.intrinsics.a4).epsilon(0.01));
  CHECK(rl.model.intrinsics.a4 >= r.model.intrinsics.a4 - 1e-9);

  cfg.a4_lambda = 0.0;
  cfg.a4_lambda_auto = true;
  const FitReport ra = stage2_fit(c, init, cfg);
  const double c0 = stage2_objective(init, c, 0.0);
  CHECK(ra.a4_lambda_used == Approx(0.01 * c0 / init.intrinsics.a4).epsilon(1e-12));
}

TEST_CASE("full fit over seeds") {
  const Modeld truth = fixture_model();
  const PointCloud c = fixture_cloud(truth, 0.005, 11);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    FitConfig cfg;
    cfg.seed = seed;
    const FitReport r = fit(c, cfg);
    if (r.rms_residual < 0.02 * truth.intrinsics.a1) ++good;
    CHECK(r.t_total == Approx(r.t_stage1 + r.t_stage2));
    CHECK(r.stage1_start_costs.size() == 3u);
    CHECK_FALSE(r.stage1_skipped);
  }
  CHECK(good >= 8);
}

TEST_CASE("fit is deterministic and honours a prior") {
  const Modeld truth = fixture_model();
  const PointCloud c = fixture_cloud(truth, 0.01, 5);
  FitConfig cfg;
  cfg.seed = 42;
  const FitReport a = fit(c, cfg), b = fit(c, cfg);
  CHECK(a.model.intrinsics == b.model.intrinsics);
  CHECK(a.model.pose.translation == b.model.pose.translation);
  CHECK(a.model.pose.orientation.coeffs() == b.model.pose.orientation.coeffs());
  CHECK(a.stage2_cost == b.stage2_cost);
  CHECK(a.rms_residual == b.rms_residual);

  const FitReport p = fit(c, cfg, truth);
  CHECK(p.stage1_skipped);
  CHECK(p.t_stage1 == 0.0);
  CHECK(p.iterations_stage1 == 0);
  CHECK(p.stage1_start_costs.empty());
  CHECK(p.rms_residual < 0.02);

  try {
    PointCloud few;
    few.points.assign(5, Vec3d::Zero());
    fit(few, cfg);
    FAIL("expected TooFewPoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewPoints);
  }
}

TEST_CASE("fit is equivariant under rigid motion") {
  const Modeld truth = fixture_model();
  const PointCloud c = fixture_cloud(truth, 0.01, 9);
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.8, Vec3d(1, 1, 1).normalized()).toRotationMatrix();
  const Vec3d shift(-3, 0.5, 2);
  PointCloud moved = c;
  for (auto& p : moved.points) p = rot * p + shift;

  FitConfig cfg, cfg_moved;
  cfg_moved.axis_starts.clear();
  for (const auto& a : cfg.axis_starts) cfg_moved.axis_starts.push_back(rot * a);
  const FitReport a = fit(c, cfg);
  const FitReport b = fit(moved, cfg_moved);
  CHECK(b.stage2_cost == Approx(a.stage2_cost).epsilon(1e-10));
  CHECK(best_rel_intrinsics_error(b.model, a.model) < 1e-6);
  Modeld expected = a.model;
  expected.pose.translation = rot * a.model.pose.translation + shift;
  expected.pose.orientation = Eigen::Quaterniond(rot) * a.model.pose.orientation;
  CHECK((b.model.pose.translation - expected.pose.translation).norm() < 1e-6);
  // Canonicalization depends on the world frame, so compare up to symmetry.
  double gap = INFINITY;
  for (const auto& v : symmetry_variants(expected)) {
    if (v.intrinsics.a1 == expected.intrinsics.a1) gap = std::min(gap, rotation_gap(b.model, v));
  }
  CHECK(gap < 1e-6);
}

TEST_CASE("symmetry canonicalization") {
  const Modeld m = fixture_model();
  const Modeld canon = symmetry_canonicalize(m);
  CHECK(same_surface(m, canon));
  CHECK(canon.intrinsics.a1 >= canon.intrinsics.a2);
  CHECK(canon.pose.orientation.w() >= 0.0);

  // Half-turn about the canonical x axis, and the quaternion sign flip.
  Modeld flipped = m;
  flipped.pose.orientation = m.pose.orientation * Eigen::Quaterniond(Eigen::AngleAxisd(std::numbers::pi, Vec3d::UnitX()));
  Modeld negated = m;
  negated.pose.orientation.coeffs() = -m.pose.orientation.coeffs();
  // a1 <-> a2 with a quarter turn about the hole axis.
  Modeld swapped = m;
  std::swap(swapped.intrinsics.a1, swapped.intrinsics.a2);
  swapped.pose.orientation = m.pose.orientation * Eigen::Quaterniond(Eigen::AngleAxisd(std::numbers::pi / 2, Vec3d::UnitZ()));

  for (const Modeld& v : {flipped, negated, swapped}) {
    CHECK(same_surface(m, v));
    const Modeld cv = symmetry_canonicalize(v);
    CHECK(cv.intrinsics == canon.intrinsics);
    CHECK((cv.pose.translation - canon.pose.translation).norm() == 0.0);
    CHECK(rotation_gap(cv, canon) < 1e-12);
  }

  const auto variants = symmetry_variants(m);
  CHECK(variants.size() == 8u);
  for (const auto& v : variants) {
    CHECK(same_surface(m, v));
    CHECK(rotation_gap(symmetry_canonicalize(v), canon) < 1e-12);
  }
}
