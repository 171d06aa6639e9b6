#include "supertoroid/synthcloud.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <random>

#include "supertoroid/diffgeo.hpp"

namespace supertoroid {

namespace detail {

std::vector<double> equal_arclength_params(double a, double b, double e, int n) {
  constexpr double pi = std::numbers::pi;
  auto curve = [&](double t) {
    return Vec2d(a * signed_power(std::cos(t), e), b * signed_power(std::sin(t), e));
  };

  // Dense polyline, refined wherever a chord is long compared to the target
  // spacing. Near seams the parametric speed is unbounded for e < 1.
  constexpr int kBase = 4096;
  std::vector<double> ts(kBase + 1);
  for (int k = 0; k <= kBase; ++k) ts[k] = -pi + 2.0 * pi * k / kBase;
  double perimeter = 0;
  for (int k = 0; k < kBase; ++k) perimeter += (curve(ts[k + 1]) - curve(ts[k])).norm();
  const double max_chord = perimeter / (64.0 * n);

  std::vector<double> refined;
  refined.reserve(ts.size() * 2);
  for (int k = 0; k < kBase; ++k) {
    std::vector<std::pair<double, double>> stack{{ts[k], ts[k + 1]}};
    while (!stack.empty()) {
      auto [lo, hi] = stack.back();
      stack.pop_back();
      if ((curve(hi) - curve(lo)).norm() > max_chord && hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        stack.push_back({mid, hi});
        stack.push_back({lo, mid});
      } else {
        refined.push_back(lo);
      }
    }
  }
  refined.push_back(pi);

  std::vector<double> cumulative(refined.size(), 0.0);
  for (std::size_t k = 1; k < refined.size(); ++k) {
    cumulative[k] = cumulative[k - 1] + (curve(refined[k]) - curve(refined[k - 1])).norm();
  }
  const double total = cumulative.back();

  std::vector<double> params(n);
  std::size_t seg = 0;
  for (int k = 0; k < n; ++k) {
    const double target = total * (k + 0.5) / n;
    while (seg + 1 < cumulative.size() - 1 && cumulative[seg + 1] < target) ++seg;
    const double span = cumulative[seg + 1] - cumulative[seg];
    const double f = span > 0 ? (target - cumulative[seg]) / span : 0.0;
    params[k] = refined[seg] + f * (refined[seg + 1] - refined[seg]);
  }
  return params;
}

}  // namespace detail

namespace {

// Corner seams (eps >= 2) have no normal; take the one-sided face normal.
Vec3d sample_normal(const Intrinsicsd& in, const SurfaceParamsd& s) {
  try {
    return normal(in, s);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CuspPoint) throw;
    return normal(in, SurfaceParamsd(s.eta + 1e-6, s.omega + 1e-6));
  }
}

}  // namespace

PointCloud sample_surface(const Modeld& model, int n_eta, int n_omega, SamplingMode mode) {
  if (n_eta < 8 || n_omega < 8) {
    throw Error(ErrorCode::InvalidArgument, "sampling needs at least 8 x 8 parameters");
  }
  constexpr double pi = std::numbers::pi;
  const auto& in = model.intrinsics;

  auto uniform = [&](int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = -pi + 2.0 * pi * (k + 0.5) / n;
    return v;
  };

  std::vector<double> omegas;
  std::vector<std::vector<double>> etas_per_omega;
  if (mode == SamplingMode::UniformAngle) {
    omegas = uniform(n_omega);
    etas_per_omega.assign(n_omega, uniform(n_eta));
  } else {
    omegas = detail::equal_arclength_params(in.a1, in.a2, in.eps2, n_omega);
    etas_per_omega.reserve(n_omega);
    for (double w : omegas) {
      etas_per_omega.push_back(
          detail::equal_arclength_params(cross_section_halfwidth(in, w), in.a3, in.eps1, n_eta));
    }
  }

  const Eigen::Matrix3d rot = model.pose.rotation();
  PointCloud cloud;
  cloud.points.resize(static_cast<std::size_t>(n_eta) * n_omega);
  cloud.normals.emplace(cloud.points.size());
  for (int j = 0; j < n_eta; ++j) {
    for (int k = 0; k < n_omega; ++k) {
      const SurfaceParamsd s(etas_per_omega[k][j], omegas[k]);
      const std::size_t idx = static_cast<std::size_t>(j) * n_omega + k;
      cloud.points[idx] = canonical_to_world(model.pose, param_point(in, s));
      (*cloud.normals)[idx] = rot * sample_normal(in, s);
    }
  }
  return cloud;
}

PointCloud partial_view(const PointCloud& cloud, const CameraView& camera) {
  if (!cloud.has_normals()) throw Error(ErrorCode::MissingNormals, "partial_view needs normals");
  if ((camera.position - camera.look_at).norm() == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "camera position equals look-at point");
  }
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    if ((*cloud.normals)[k].dot(camera.position - cloud.points[k]) > 0.0) keep.push_back(k);
  }
  if (keep.empty()) throw Error(ErrorCode::EmptyResult, "camera sees no points");
  return cloud.select(keep);
}

PointCloud add_noise(const PointCloud& cloud, double sigma, std::uint64_t seed) {
  if (sigma < 0) throw Error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
  PointCloud out = cloud;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (auto& p : out.points) {
    p.x() += gauss(rng);
    p.y() += gauss(rng);
    p.z() += gauss(rng);
  }
  if (out.normals) out.normals_stale = true;
  return out;
}

PointCloud downsample_random(const PointCloud& cloud, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "downsample size must be >= 1");
  if (n >= cloud.size()) return cloud;
  std::vector<std::size_t> idx(cloud.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < n; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return cloud.select(idx);
}

}  // namespace supertoroid
