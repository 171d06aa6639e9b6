#include "supertoroid/fitting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "supertoroid/optimizer.hpp"
#include "supertoroid/synthcloud.hpp"

namespace supertoroid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Parameter packing: translation (3), quaternion w,x,y,z (4), then intrinsics.
constexpr int kTranslation = 0;
constexpr int kQuat = 3;
constexpr int kIntrinsics = 7;

void write_pose(const Posed& pose, Eigen::VectorXd& x) {
  x.segment<3>(kTranslation) = pose.translation;
  x[kQuat + 0] = pose.orientation.w();
  x[kQuat + 1] = pose.orientation.x();
  x[kQuat + 2] = pose.orientation.y();
  x[kQuat + 3] = pose.orientation.z();
}

Posed read_pose(const Eigen::VectorXd& x) {
  Posed pose;
  pose.translation = x.segment<3>(kTranslation);
  pose.orientation =
      Eigen::Quaterniond(x[kQuat + 0], x[kQuat + 1], x[kQuat + 2], x[kQuat + 3]);
  const double n = pose.orientation.norm();
  if (n > 0.0 && std::isfinite(n)) {
    pose.orientation.coeffs() /= n;
  } else {
    pose.orientation = Eigen::Quaterniond::Identity();
  }
  return pose;
}

void normalize_quaternion(Eigen::VectorXd& x) {
  const double n = x.segment<4>(kQuat).norm();
  if (n > 0.0 && std::isfinite(n)) x.segment<4>(kQuat) /= n;
}

double cloud_scale(const PointCloud& cloud) {
  const Vec3d c = cloud.centroid();
  double s = 0.0;
  for (const auto& p : cloud.points) s += (p - c).squaredNorm();
  s = std::sqrt(s / static_cast<double>(std::max<std::size_t>(cloud.size(), 1)));
  return s > 0.0 ? s : 1.0;
}

struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd scale;
};

// Bounds for the full 13-vector; the stage-1 layout picks a subset.
Bounds full_bounds(const FitConfig& cfg, double s) {
  Bounds b;
  b.lower.resize(13);
  b.upper.resize(13);
  b.scale.resize(13);
  b.lower.segment<3>(kTranslation).setConstant(-kInf);
  b.upper.segment<3>(kTranslation).setConstant(kInf);
  b.scale.segment<3>(kTranslation).setConstant(s);
  b.lower.segment<4>(kQuat).setConstant(-2.0);
  b.upper.segment<4>(kQuat).setConstant(2.0);
  b.scale.segment<4>(kQuat).setConstant(1.0);
  for (int k = 0; k < 3; ++k) {
    b.lower[kIntrinsics + k] = 1e-3 * s;
    b.upper[kIntrinsics + k] = 20.0 * s;
    b.scale[kIntrinsics + k] = s;
  }
  b.lower[kIntrinsics + 3] = cfg.a4_min;
  b.upper[kIntrinsics + 3] = cfg.a4_max;
  b.scale[kIntrinsics + 3] = 1.0;
  for (int k = 4; k < 6; ++k) {
    b.lower[kIntrinsics + k] = cfg.eps_bounds.lo;
    b.upper[kIntrinsics + k] = cfg.eps_bounds.hi;
    b.scale[kIntrinsics + k] = 1.0;
  }
  return b;
}

Eigen::VectorXd clamp_to(const Bounds& b, Eigen::VectorXd x) {
  return x.cwiseMax(b.lower).cwiseMin(b.upper);
}

Eigen::VectorXd pack_full(const Modeld& m) {
  Eigen::VectorXd x(13);
  write_pose(m.pose, x);
  const auto& i = m.intrinsics;
  x.segment<6>(kIntrinsics) << i.a1, i.a2, i.a3, i.a4, i.eps1, i.eps2;
  return x;
}

Modeld unpack_full(const Eigen::VectorXd& x) {
  Modeld m;
  m.pose = read_pose(x);
  m.intrinsics = {x[kIntrinsics + 0], x[kIntrinsics + 1], x[kIntrinsics + 2],
                  x[kIntrinsics + 3], x[kIntrinsics + 4], x[kIntrinsics + 5]};
  return m;
}

// Stage-1 layout: pose (7), a1, a2, a4, one exponent.
constexpr int kStage1Size = 11;

int stage1_exponent_slot(Stage1Exponent e) {
  return kIntrinsics + (e == Stage1Exponent::Eps2 ? 5 : 4);
}

Eigen::VectorXd pack_stage1(const Modeld& m, Stage1Exponent e) {
  const Eigen::VectorXd full = pack_full(m);
  Eigen::VectorXd x(kStage1Size);
  x.head<7>() = full.head<7>();
  x[7] = full[kIntrinsics + 0];
  x[8] = full[kIntrinsics + 1];
  x[9] = full[kIntrinsics + 3];
  x[10] = full[stage1_exponent_slot(e)];
  return x;
}

Modeld unpack_stage1(const Eigen::VectorXd& x, const Modeld& base, Stage1Exponent e) {
  Eigen::VectorXd full = pack_full(base);
  full.head<7>() = x.head<7>();
  full[kIntrinsics + 0] = x[7];
  full[kIntrinsics + 1] = x[8];
  full[kIntrinsics + 3] = x[9];
  full[stage1_exponent_slot(e)] = x[10];
  return unpack_full(full);
}

Bounds stage1_bounds(const Bounds& full, Stage1Exponent e) {
  const int slots[kStage1Size] = {0, 1, 2, 3, 4, 5, 6, kIntrinsics + 0, kIntrinsics + 1,
                                  kIntrinsics + 3, stage1_exponent_slot(e)};
  Bounds b;
  b.lower.resize(kStage1Size);
  b.upper.resize(kStage1Size);
  b.scale.resize(kStage1Size);
  for (int k = 0; k < kStage1Size; ++k) {
    b.lower[k] = full.lower[slots[k]];
    b.upper[k] = full.upper[slots[k]];
    b.scale[k] = full.scale[slots[k]];
  }
  return b;
}

void stage1_residuals(const Modeld& m, const PointCloud& cloud, Eigen::VectorXd& r) {
  const auto& in = m.intrinsics;
  r.resize(2 * static_cast<Eigen::Index>(cloud.size()));
  const Eigen::Matrix3d rt = m.pose.rotation().transpose();
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    const Vec3d c = rt * (cloud.points[k] - m.pose.translation);
    const double rho = std::hypot(c.x(), c.y());
    const double ws = rho > 0.0 ? omega_s_from_direction(in, c.x(), c.y()) : 0.0;
    r[2 * k] = rho - in.a4 * cross_section_halfwidth(in, ws);
    r[2 * k + 1] = c.z();
  }
}

double quantile(std::vector<double>& v, double q) {
  auto it = v.begin() + static_cast<std::ptrdiff_t>(q * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), it, v.end());
  return *it;
}

// Stage 1 only sees the products a1 a4 and a2 a4, and never a3. Re-derive the
// tube size in the fitted frame: the radial spread about the mean superellipse
// fixes the a4 split, the spread along the axis fixes a3.
Modeld refresh_tube(const Modeld& m, const PointCloud& cloud, const FitConfig& cfg) {
  const auto& in = m.intrinsics;
  const Eigen::Matrix3d rt = m.pose.rotation().transpose();
  std::vector<double> radial, axial;
  radial.reserve(cloud.size());
  axial.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    const Vec3d c = rt * (p - m.pose.translation);
    axial.push_back(std::abs(c.z()));
    const double rho = std::hypot(c.x(), c.y());
    if (!(rho > 0.0)) continue;
    const double mean_r = in.a4 * cross_section_halfwidth(in, omega_s_from_direction(in, c.x(), c.y()));
    if (mean_r > 0.0) radial.push_back(std::abs(rho / mean_r - 1.0));
  }
  Modeld out = m;
  if (radial.size() >= 12) {
    const double spread = quantile(radial, 0.95);
    if (spread > 0.0) {
      const double a4 = std::clamp(1.0 / spread, cfg.a4_min, cfg.a4_max);
      out.intrinsics.a1 = in.a1 * in.a4 / a4;
      out.intrinsics.a2 = in.a2 * in.a4 / a4;
      out.intrinsics.a4 = a4;
    }
  }
  if (!cfg.a3_init && axial.size() >= 12) {
    const double h = quantile(axial, 0.95);
    if (h > 0.0) out.intrinsics.a3 = h;
  }
  return out;
}

double sum_of_squares(const Eigen::VectorXd& r) {
  CompensatedSum<double> s;
  for (Eigen::Index k = 0; k < r.size(); ++k) s.add(r[k] * r[k]);
  return s.value();
}

// Meridian residuals (signed), plus sqrt(lambda (a4_max - a4)) so that the
// squared norm equals sum d^2 - lambda a4 up to a constant.
void stage2_residuals(const Modeld& m, const PointCloud& cloud, const FitConfig& cfg,
                      double a4_lambda, Eigen::VectorXd& r) {
  const auto& in = m.intrinsics;
  const Eigen::Index n = static_cast<Eigen::Index>(cloud.size());
  r.resize(n + (a4_lambda > 0.0 ? 1 : 0));
  const Eigen::Matrix3d rt = m.pose.rotation().transpose();
  const double weight = cfg.volume_weighting ? std::sqrt(in.a1 * in.a2 * in.a3) : 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vec3d c = rt * (cloud.points[k] - m.pose.translation);
    r[k] = weight * meridian_decompose(in, c).signed_distance;
  }
  if (a4_lambda > 0.0) {
    r[n] = std::sqrt(a4_lambda * std::max(cfg.a4_max - in.a4, 0.0));
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::Matrix3d half_turn(int axis) {
  Eigen::Matrix3d r = -Eigen::Matrix3d::Identity();
  r(axis, axis) = 1.0;
  return r;
}

Eigen::Matrix3d quarter_turn_z() {
  Eigen::Matrix3d r;
  r << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  return r;
}

int dominant_index(const Vec3d& v) {
  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(v[k]) > std::abs(v[best]) + 1e-12) best = k;
  }
  return best;
}

Modeld with_rotation(const Modeld& m, const Eigen::Matrix3d& r) {
  Modeld out = m;
  out.pose.orientation = Eigen::Quaterniond(r).normalized();
  if (out.pose.orientation.w() < 0.0) out.pose.orientation.coeffs() *= -1.0;
  return out;
}

// Each stage optimizes the pose relative to its starting frame, so a rigidly
// moved cloud with a moved start runs through the same iterates.
PointCloud in_frame(const PointCloud& cloud, const Posed& frame) {
  PointCloud out;
  out.points.reserve(cloud.size());
  const Eigen::Matrix3d rt = frame.rotation().transpose();
  for (const auto& p : cloud.points) out.points.push_back(rt * (p - frame.translation));
  return out;
}

Modeld from_frame(const Modeld& local, const Posed& frame) {
  Modeld out = local;
  out.pose.translation = frame.translation + frame.rotation() * local.pose.translation;
  out.pose.orientation = (frame.orientation * local.pose.orientation).normalized();
  return out;
}

Posed normalized_pose(const Posed& p) {
  Posed out = p;
  out.orientation.normalize();
  return out;
}

}  // namespace

void FitConfig::validate() const {
  if (stage1_points < 12 || stage2_points < 12) {
    throw Error(ErrorCode::InvalidArgument, "stage point counts must be >= 12");
  }
  if (stage1_points > stage2_points) {
    throw Error(ErrorCode::InvalidArgument, "stage1_points must not exceed stage2_points");
  }
  if (!(eps_bounds.lo > 0.0) || !(eps_bounds.lo < eps_bounds.hi)) {
    throw Error(ErrorCode::InvalidArgument, "exponent bounds must satisfy 0 < lo < hi");
  }
  if (!(a4_min >= 0.0) || !(a4_min < a4_max)) {
    throw Error(ErrorCode::InvalidArgument, "a4 bounds must satisfy 0 <= min < max");
  }
  if (a4_lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "a4_lambda must be >= 0");
  if (a3_init && !(*a3_init > 0.0)) throw Error(ErrorCode::InvalidArgument, "a3_init must be > 0");
  if (axis_starts.empty()) throw Error(ErrorCode::InvalidArgument, "no axis starts");
  for (const auto& a : axis_starts) {
    if (!(a.norm() > 0.0)) throw Error(ErrorCode::InvalidArgument, "zero axis start");
  }
  if (max_iters_stage1 < 1 || max_iters_stage2 < 1) {
    throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  }
}

const char* to_string(FitQuality q) {
  switch (q) {
    case FitQuality::Good: return "good";
    case FitQuality::Decent: return "decent";
    case FitQuality::Bad: return "bad";
  }
  return "?";
}

FitQuality grade_fit(double rms_residual, double a1) {
  if (!std::isfinite(rms_residual)) return FitQuality::Bad;
  if (rms_residual < 0.02 * a1) return FitQuality::Good;
  if (rms_residual < 0.05 * a1) return FitQuality::Decent;
  return FitQuality::Bad;
}

Modeld initial_guess(const PointCloud& cloud, const FitConfig& cfg, const Vec3d& axis) {
  if (cloud.size() < 12) throw Error(ErrorCode::TooFewPoints, "initial guess needs >= 12 points");
  const Vec3d center = cloud.centroid();
  const Vec3d dir = axis.normalized();

  std::vector<double> radial;
  radial.reserve(cloud.size());
  double lo = kInf, hi = -kInf;
  Eigen::Matrix3d spread = Eigen::Matrix3d::Zero();
  for (const auto& p : cloud.points) {
    const Vec3d d = p - center;
    const double along = d.dot(dir);
    const Vec3d perp = d - along * dir;
    radial.push_back(perp.norm());
    spread += perp * perp.transpose();
    lo = std::min(lo, along);
    hi = std::max(hi, along);
  }
  auto mid = radial.begin() + static_cast<std::ptrdiff_t>(radial.size() / 2);
  std::nth_element(radial.begin(), mid, radial.end());
  const double median = *mid;

  // Canonical x along the widest in-plane direction of the cloud.
  Modeld m;
  m.pose = Posed::from_axis(center, dir);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(spread);
  Vec3d ex = eig.eigenvectors().col(2);
  ex -= ex.dot(dir) * dir;
  if (eig.info() == Eigen::Success && ex.norm() > 0.5) {
    ex.normalize();
    Eigen::Matrix3d r;
    r.col(0) = ex;
    r.col(1) = dir.cross(ex);
    r.col(2) = dir;
    m.pose.orientation = Eigen::Quaterniond(r).normalized();
  }
  const double half_median = std::max(0.5 * median, 1e-9);
  m.intrinsics.a1 = half_median;
  m.intrinsics.a2 = half_median;
  m.intrinsics.a4 = std::clamp(2.0, cfg.a4_min, cfg.a4_max);
  m.intrinsics.a3 = cfg.a3_init ? *cfg.a3_init : std::max(0.5 * (hi - lo), 1e-9);
  m.intrinsics.eps1 = std::clamp(1.0, cfg.eps_bounds.lo, cfg.eps_bounds.hi);
  m.intrinsics.eps2 = m.intrinsics.eps1;
  return m;
}

double stage1_cost(const Modeld& model, const PointCloud& cloud) {
  Eigen::VectorXd r;
  stage1_residuals(model, cloud, r);
  return sum_of_squares(r);
}

StageResult stage1_fit(const PointCloud& cloud, const Modeld& init, const FitConfig& cfg) {
  if (cloud.size() < 12) throw Error(ErrorCode::TooFewPoints, "stage 1 needs >= 12 points");
  const Posed frame = normalized_pose(init.pose);
  const PointCloud local = in_frame(cloud, frame);
  const Bounds full = full_bounds(cfg, cloud_scale(local));
  const Bounds b = stage1_bounds(full, cfg.stage1_exponent);
  const Stage1Exponent which = cfg.stage1_exponent;

  // Everything stage 1 does not free stays at the (clamped) initial values.
  Modeld local_init{init.intrinsics, Posed{}};
  const Modeld base = unpack_full(clamp_to(full, pack_full(local_init)));

  BoundedLsqProblem problem;
  problem.lower = b.lower;
  problem.upper = b.upper;
  problem.scale = b.scale;
  problem.project = normalize_quaternion;
  problem.residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    stage1_residuals(unpack_stage1(x, base, which), local, r);
  };

  LmOptions opt;
  opt.max_iters = cfg.max_iters_stage1;
  opt.tol = cfg.convergence_tol;
  const LmResult lm = minimize_bounded_lsq(problem, pack_stage1(base, which), opt);

  StageResult out;
  if (!std::isfinite(lm.final_cost)) {
    out.model = init;
    out.cost = kInf;
    out.iterations = lm.iterations;
    return out;
  }
  out.model = refresh_tube(from_frame(unpack_stage1(lm.x, base, which), frame), cloud, cfg);
  out.cost = stage1_cost(out.model, cloud);
  out.iterations = lm.iterations;
  out.converged = lm.converged;
  return out;
}

MultistartResult stage1_multistart(const PointCloud& cloud, const FitConfig& cfg) {
  MultistartResult out;
  out.best.cost = kInf;
  for (std::size_t k = 0; k < cfg.axis_starts.size(); ++k) {
    const Modeld init = initial_guess(cloud, cfg, cfg.axis_starts[k]);
    StageResult r = stage1_fit(cloud, init, cfg);
    out.start_costs.push_back(r.cost);
    out.starts.push_back(r);
    // Strict comparison: ties go to the earlier start.
    if (r.cost < out.best.cost) {
      out.best = r;
      out.winning_start = static_cast<int>(k);
    }
  }
  if (out.winning_start < 0) {
    throw Error(ErrorCode::AllStartsFailed, "no stage-1 start produced a finite cost");
  }
  return out;
}

double stage2_objective(const Modeld& model, const PointCloud& cloud, double a4_lambda) {
  return cloud_cost(model.intrinsics, model.pose, std::span<const Vec3d>(cloud.points)) -
         a4_lambda * model.intrinsics.a4;
}

FitReport stage2_fit(const PointCloud& cloud, const Modeld& init, const FitConfig& cfg) {
  if (cloud.size() < 12) throw Error(ErrorCode::TooFewPoints, "stage 2 needs >= 12 points");
  const Posed frame = normalized_pose(init.pose);
  const PointCloud local = in_frame(cloud, frame);
  const Bounds b = full_bounds(cfg, cloud_scale(local));
  const Eigen::VectorXd x0 = clamp_to(b, pack_full(Modeld{init.intrinsics, Posed{}}));
  const Modeld start = unpack_full(x0);

  double lambda = cfg.a4_lambda;
  if (cfg.a4_lambda_auto) {
    const double c0 = cloud_cost(start.intrinsics, start.pose, std::span<const Vec3d>(local.points));
    lambda = start.intrinsics.a4 > 0.0 ? 0.01 * c0 / start.intrinsics.a4 : 0.0;
  }

  BoundedLsqProblem problem;
  problem.lower = b.lower;
  problem.upper = b.upper;
  problem.scale = b.scale;
  problem.project = normalize_quaternion;
  problem.residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    stage2_residuals(unpack_full(x), local, cfg, lambda, r);
  };

  LmOptions opt;
  opt.max_iters = cfg.max_iters_stage2;
  opt.tol = cfg.convergence_tol;
  const LmResult lm = minimize_bounded_lsq(problem, x0, opt);
  if (!std::isfinite(lm.final_cost)) {
    throw Error(ErrorCode::OptimizerFailure, "stage-2 objective is not finite");
  }

  FitReport report;
  report.model = from_frame(unpack_full(lm.x), frame);
  report.stage2_cost = stage2_objective(report.model, cloud, lambda);
  report.iterations_stage2 = lm.iterations;
  report.converged = lm.converged;
  report.a4_lambda_used = lambda;
  return report;
}

void fill_diagnostics(FitReport& report, const PointCloud& cloud, double inlier_tau_rel) {
  const auto& in = report.model.intrinsics;
  report.inlier_tau = inlier_tau_rel * in.a1;
  CompensatedSum<double> sum;
  std::size_t inliers = 0;
  int degenerate = 0;
  for (const auto& p : cloud.points) {
    const auto d = meridian_decompose(in, world_to_canonical(report.model.pose, p));
    sum.add(d.d_s * d.d_s);
    if (d.d_s < report.inlier_tau) ++inliers;
    if (d.degenerate()) ++degenerate;
  }
  const double n = static_cast<double>(std::max<std::size_t>(cloud.size(), 1));
  report.rms_residual = std::sqrt(sum.value() / n);
  report.inlier_fraction = static_cast<double>(inliers) / n;
  report.degenerate_point_count = degenerate;
  report.quality = grade_fit(report.rms_residual, in.a1);
}

FitReport fit(const PointCloud& cloud, const FitConfig& cfg, const std::optional<Modeld>& prior) {
  cfg.validate();
  if (cloud.size() < 12) throw Error(ErrorCode::TooFewPoints, "fit needs >= 12 points");
  using clock = std::chrono::steady_clock;

  Modeld stage2_init;
  MultistartResult s1;
  double t_s1 = 0.0;
  if (prior) {
    stage2_init = *prior;
  } else {
    const auto t0 = clock::now();
    const PointCloud sub1 = downsample_random(cloud, static_cast<std::size_t>(cfg.stage1_points), cfg.seed);
    s1 = stage1_multistart(sub1, cfg);
    stage2_init = s1.best.model;
    t_s1 = seconds_since(t0);
  }

  const auto t1 = clock::now();
  const PointCloud sub2 = downsample_random(cloud, static_cast<std::size_t>(cfg.stage2_points), cfg.seed);
  FitReport report;
  int refined = s1.winning_start;
  if (!prior && cfg.refine_all_starts) {
    bool have = false;
    for (std::size_t k = 0; k < s1.starts.size(); ++k) {
      if (!std::isfinite(s1.starts[k].cost)) continue;
      FitReport r = stage2_fit(sub2, s1.starts[k].model, cfg);
      if (!have || r.stage2_cost < report.stage2_cost) {
        report = std::move(r);
        refined = static_cast<int>(k);
        have = true;
      }
    }
  } else {
    report = stage2_fit(sub2, stage2_init, cfg);
  }
  const double t_s2 = seconds_since(t1);

  report.model = symmetry_canonicalize(report.model);
  report.stage1_skipped = prior.has_value();
  report.stage1_cost = prior ? 0.0 : s1.start_costs[refined];
  report.stage1_start_costs = s1.start_costs;
  report.winning_start = refined;
  report.iterations_stage1 = prior ? 0 : s1.starts[refined].iterations;
  report.t_stage1 = t_s1;
  report.t_stage2 = t_s2;
  report.t_total = t_s1 + t_s2;
  fill_diagnostics(report, cloud, cfg.inlier_tau_rel);
  return report;
}

Modeld symmetry_canonicalize(const Modeld& m) {
  Modeld out = m;
  Eigen::Matrix3d r = m.pose.orientation.normalized().toRotationMatrix();
  if (out.intrinsics.a1 < out.intrinsics.a2) {
    std::swap(out.intrinsics.a1, out.intrinsics.a2);
    r = r * quarter_turn_z();
  }
  const Vec3d ez = r.col(2);
  if (ez[dominant_index(ez)] < 0.0) r = r * half_turn(0);
  const Vec3d ex = r.col(0);
  if (ex[dominant_index(ex)] < 0.0) r = r * half_turn(2);
  return with_rotation(out, r);
}

std::vector<Modeld> symmetry_variants(const Modeld& m) {
  std::vector<Modeld> out;
  const Eigen::Matrix3d r = m.pose.orientation.normalized().toRotationMatrix();
  Modeld swapped = m;
  std::swap(swapped.intrinsics.a1, swapped.intrinsics.a2);
  const Eigen::Matrix3d rs = r * quarter_turn_z();
  for (const Eigen::Matrix3d& flip :
       {Eigen::Matrix3d(Eigen::Matrix3d::Identity()), half_turn(0), half_turn(1), half_turn(2)}) {
    out.push_back(with_rotation(m, r * flip));
    out.push_back(with_rotation(swapped, rs * flip));
  }
  return out;
}

}  // namespace supertoroid
