#pragma once

// Meridian radial distance to a supertoroid.
//
// A canonical-frame point p is split as p = R_pi + p_R, where R_pi = beta2 p_pi
// is the mean-superellipse point in the vertical half-plane of p and p_R the
// remainder inside that half-plane. The surface point is p_s = R_pi + beta1 p_R
// and the distance d_s = |1 - beta1| |p_R|.

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <utility>

#include "supertoroid/geometry.hpp"

namespace supertoroid {

template <typename Scalar>
struct MeridianOptions {
  /// |p_pi| and |p_R| below axis_tol_rel * a1 are treated as degenerate.
  Scalar axis_tol_rel = Scalar(1e-9);
};

enum class Degeneracy { None, OnAxis, OnCenterline };

template <typename Scalar>
struct RadialDecomposition {
  Vec3<Scalar> p_pi = Vec3<Scalar>::Zero();
  Vec3<Scalar> R_pi = Vec3<Scalar>::Zero();
  Vec3<Scalar> p_R = Vec3<Scalar>::Zero();
  Scalar beta1 = 0;
  Scalar beta2 = 0;
  Vec3<Scalar> p_s = Vec3<Scalar>::Zero();
  Scalar d_s = 0;
  /// (1 - beta1) |p_R|: positive outside the surface, negative inside.
  Scalar signed_distance = 0;
  Scalar omega_s = 0;
  Degeneracy degeneracy = Degeneracy::None;

  bool degenerate() const { return degeneracy != Degeneracy::None; }
};

template <typename Scalar>
Vec3<Scalar> project_to_plane(const Vec3<Scalar>& p) {
  return {p.x(), p.y(), Scalar(0)};
}

template <typename Scalar>
Scalar axis_tolerance(const Intrinsics<Scalar>& i, const MeridianOptions<Scalar>& opt = {}) {
  return opt.axis_tol_rel * i.a1;
}

/// Polar angle of the vertical half-plane containing p.
template <typename Scalar>
Scalar omega_pi(const Vec3<Scalar>& p, Scalar axis_tol) {
  if (std::hypot(p.x(), p.y()) <= axis_tol) {
    throw Error(ErrorCode::OnAxis, "point lies on the hole axis");
  }
  return std::atan2(p.y(), p.x());
}

/// Major ratio: beta2 p_pi lies on the mean superellipse.
template <typename Scalar>
Scalar beta2(const Intrinsics<Scalar>& i, const Vec3<Scalar>& p_pi, Scalar axis_tol) {
  if (std::hypot(p_pi.x(), p_pi.y()) <= axis_tol) {
    throw Error(ErrorCode::OnAxis, "projected point lies on the hole axis");
  }
  const Scalar fm = mean_superellipse_F(i, Vec2<Scalar>(p_pi.x(), p_pi.y()));
  return std::pow(fm, -i.eps2 / Scalar(2));
}

/// Coordinates (x', z') of p in the cross-section frame centred on the mean
/// superellipse point of parameter omega_s.
template <typename Scalar>
std::pair<Scalar, Scalar> cross_section_local_coords(const Intrinsics<Scalar>& i, Scalar omega_s,
                                                     const Vec3<Scalar>& p) {
  const Scalar c = signed_power(std::cos(omega_s), i.eps2);
  const Scalar s = signed_power(std::sin(omega_s), i.eps2);
  const Scalar aw = cross_section_halfwidth(i, omega_s);
  const Scalar x_local =
      (i.a1 * c * (p.x() - i.a1 * i.a4 * c) + i.a2 * s * (p.y() - i.a2 * i.a4 * s)) / aw;
  return {x_local, p.z()};
}

/// Inside-outside function of the cross-section superellipse in local coordinates.
template <typename Scalar>
Scalar cross_section_F(const Intrinsics<Scalar>& i, Scalar halfwidth, Scalar x_local,
                       Scalar z_local) {
  const Scalar e = Scalar(2) / i.eps1;
  return std::pow(std::abs(x_local / halfwidth), e) + std::pow(std::abs(z_local / i.a3), e);
}

/// Minor ratio: beta1 p_R lies on the cross-section superellipse.
template <typename Scalar>
Scalar beta1(const Intrinsics<Scalar>& i, const Vec3<Scalar>& p, Scalar axis_tol) {
  if (std::hypot(p.x(), p.y()) <= axis_tol) {
    throw Error(ErrorCode::OnAxis, "point lies on the hole axis");
  }
  const Scalar ws = omega_s_from_direction(i, p.x(), p.y());
  const auto [xl, zl] = cross_section_local_coords(i, ws, p);
  if (std::hypot(xl, zl) <= axis_tol) {
    throw Error(ErrorCode::OnMeanSuperellipse, "point lies on the tube centerline");
  }
  const Scalar fe = cross_section_F(i, cross_section_halfwidth(i, ws), xl, zl);
  return std::pow(fe, -i.eps1 / Scalar(2));
}

/// Full decomposition and meridian distance. Never throws: on the hole axis
/// the construction runs in the omega = 0 half-plane, and on the tube
/// centerline the distance is the smaller cross-section half-width. Both
/// cases are flagged in `degeneracy`.
template <typename Scalar>
RadialDecomposition<Scalar> meridian_decompose(const Intrinsics<Scalar>& i, const Vec3<Scalar>& p,
                                               const MeridianOptions<Scalar>& opt = {}) {
  const Scalar tol = axis_tolerance(i, opt);
  RadialDecomposition<Scalar> d;
  d.p_pi = project_to_plane(p);
  const Scalar rho = std::hypot(p.x(), p.y());

  if (rho <= tol) {
    d.degeneracy = Degeneracy::OnAxis;
    d.omega_s = Scalar(0);
    d.beta2 = std::numeric_limits<Scalar>::infinity();
  } else {
    d.omega_s = omega_s_from_direction(i, p.x(), p.y());
  }

  const Scalar c = signed_power(std::cos(d.omega_s), i.eps2);
  const Scalar s = signed_power(std::sin(d.omega_s), i.eps2);
  const Scalar aw = cross_section_halfwidth(i, d.omega_s);
  d.R_pi = Vec3<Scalar>(i.a1 * i.a4 * c, i.a2 * i.a4 * s, Scalar(0));
  if (d.degeneracy == Degeneracy::None) d.beta2 = i.a4 * aw / rho;
  d.p_R = p - d.R_pi;

  const auto [xl, zl] = cross_section_local_coords(i, d.omega_s, p);
  if (std::hypot(xl, zl) <= tol) {
    d.degeneracy = Degeneracy::OnCenterline;
    d.beta1 = std::numeric_limits<Scalar>::infinity();
    const Vec3<Scalar> radial(i.a1 * c / aw, i.a2 * s / aw, Scalar(0));
    d.p_s = aw < i.a3 ? Vec3<Scalar>(d.R_pi + aw * radial)
                      : Vec3<Scalar>(d.R_pi + i.a3 * Vec3<Scalar>::UnitZ());
    d.d_s = std::min(aw, i.a3);
    d.signed_distance = -d.d_s;
    return d;
  }

  d.beta1 = std::pow(cross_section_F(i, aw, xl, zl), -i.eps1 / Scalar(2));
  d.p_s = d.R_pi + d.beta1 * d.p_R;
  d.signed_distance = (Scalar(1) - d.beta1) * d.p_R.norm();
  d.d_s = std::abs(d.signed_distance);
  return d;
}

template <typename Scalar>
Scalar meridian_distance(const Intrinsics<Scalar>& i, const Vec3<Scalar>& p,
                         const MeridianOptions<Scalar>& opt = {}) {
  return meridian_decompose(i, p, opt).d_s;
}

/// Neumaier-compensated running sum.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar v) {
    const Scalar t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_ = 0;
  Scalar comp_ = 0;
};

/// Sum of squared meridian distances of world-frame points.
template <typename Scalar>
Scalar cloud_cost(const Intrinsics<Scalar>& i, const Pose<Scalar>& pose,
                  std::span<const Vec3<Scalar>> points, const MeridianOptions<Scalar>& opt = {}) {
  if (points.empty()) throw Error(ErrorCode::EmptyCloud, "cloud has no points");
  CompensatedSum<Scalar> sum;
  for (const auto& p : points) {
    const Scalar d = meridian_distance(i, world_to_canonical(pose, p), opt);
    sum.add(d * d);
  }
  return sum.value();
}

}  // namespace supertoroid
