#pragma once

// Two-stage supertoroid recovery.
//
// Stage 1 locates the hole: it fits the plane and the mean superellipse to a
// small random subset, once per starting axis, and keeps the cheapest result.
// Stage 2 fits all 12 parameters by least squares on the meridian radial
// distance, optionally rewarding a larger a4 for partial clouds.

#include <cstdint>
#include <optional>
#include <vector>

#include "supertoroid/geometry.hpp"
#include "supertoroid/meridian.hpp"
#include "supertoroid/point_cloud.hpp"

namespace supertoroid {

/// Which exponent stage 1 frees alongside a1, a2, a4. The mean superellipse
/// only depends on eps2; Eps1 frees eps1 instead, which leaves it unconstrained.
enum class Stage1Exponent { Eps2, Eps1 };

struct FitConfig {
  int stage1_points = 150;
  int stage2_points = 1000;
  std::uint64_t seed = 0;
  ExponentBounds<double> eps_bounds{0.1, 2.5};
  /// Weight of the -a4 term in the stage-2 objective.
  double a4_lambda = 0.0;
  /// Calibrate a4_lambda at run time to 1% of the initial stage-2 cost.
  bool a4_lambda_auto = false;
  double a4_min = 1.05;
  double a4_max = 10.0;
  /// Half-height of the initial guess; half the axial extent when unset.
  std::optional<double> a3_init;
  int max_iters_stage1 = 200;
  int max_iters_stage2 = 200;
  double convergence_tol = 1e-10;
  std::vector<Vec3d> axis_starts{Vec3d::UnitX(), Vec3d::UnitY(), Vec3d::UnitZ()};
  Stage1Exponent stage1_exponent = Stage1Exponent::Eps2;
  /// Multiply residuals by sqrt(a1 a2 a3).
  bool volume_weighting = false;
  /// Run stage 2 from every stage-1 start and keep the lowest stage-2 cost,
  /// instead of refining only the stage-1 winner.
  bool refine_all_starts = false;
  /// Inlier threshold for diagnostics, relative to the fitted a1.
  double inlier_tau_rel = 0.02;

  /// Throws InvalidArgument when the config is inconsistent.
  void validate() const;
};

enum class FitQuality { Good, Decent, Bad };

const char* to_string(FitQuality q);

/// Residual-based stand-in for a visual grade: rms below 2% of a1 is good,
/// below 5% decent.
FitQuality grade_fit(double rms_residual, double a1);

struct FitReport {
  Modeld model;
  double stage1_cost = 0.0;
  double stage2_cost = 0.0;
  /// Stage-1 cost per axis start, in start order.
  std::vector<double> stage1_start_costs;
  /// Start whose result was refined into `model`.
  int winning_start = -1;
  double rms_residual = 0.0;
  double inlier_fraction = 0.0;
  double inlier_tau = 0.0;
  int iterations_stage1 = 0;
  int iterations_stage2 = 0;
  double t_stage1 = 0.0;
  double t_stage2 = 0.0;
  double t_total = 0.0;
  int degenerate_point_count = 0;
  double a4_lambda_used = 0.0;
  bool stage1_skipped = false;
  bool converged = false;
  FitQuality quality = FitQuality::Bad;
};

struct StageResult {
  Modeld model;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct MultistartResult {
  StageResult best;
  /// Every start's result, in start order.
  std::vector<StageResult> starts;
  std::vector<double> start_costs;
  int winning_start = -1;
};

/// Centroid, canonical z along `axis` and x along the widest in-plane spread,
/// a1 = a2 = half the median distance from the axis, a4 = 2, a3 from config
/// or half the axial extent, eps1 = eps2 = 1.
Modeld initial_guess(const PointCloud& cloud, const FitConfig& cfg, const Vec3d& axis);

/// Stage-1 cost of `model`: sum of (rho - R(omega))^2 + z^2 over the cloud in
/// the model's canonical frame.
double stage1_cost(const Modeld& model, const PointCloud& cloud);

StageResult stage1_fit(const PointCloud& cloud, const Modeld& init, const FitConfig& cfg);

MultistartResult stage1_multistart(const PointCloud& cloud, const FitConfig& cfg);

/// Stage-2 objective: sum of squared meridian distances minus a4_lambda * a4.
double stage2_objective(const Modeld& model, const PointCloud& cloud, double a4_lambda);

FitReport stage2_fit(const PointCloud& cloud, const Modeld& init, const FitConfig& cfg);

/// Full pipeline. With `prior`, stage 1 is skipped and stage 2 starts there.
FitReport fit(const PointCloud& cloud, const FitConfig& cfg,
              const std::optional<Modeld>& prior = std::nullopt);

/// Residual statistics of `model` on `cloud` (rms, inliers, degenerate count).
void fill_diagnostics(FitReport& report, const PointCloud& cloud, double inlier_tau_rel);

/// Canonical representative of the model's symmetry class: a1 >= a2 (by a
/// quarter turn about the hole axis), the dominant world component of the
/// hole axis and then of the x axis positive, and q0 >= 0.
Modeld symmetry_canonicalize(const Modeld& m);

/// All parametrizations describing the same surface as `m`: the four
/// half-turns about the canonical axes, each with and without the
/// a1 <-> a2 quarter turn.
std::vector<Modeld> symmetry_variants(const Modeld& m);

}  // namespace supertoroid
