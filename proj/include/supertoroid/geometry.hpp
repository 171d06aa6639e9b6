#pragma once

// Canonical-frame supertoroid: parametric and implicit forms, the mean and
// cross-section superellipses, and rigid placement in the world.
//
// Canonical frame: hole axis along +z, right-handed. All fractional powers of
// trigonometric quantities are signed powers so every quadrant is covered.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

#include "supertoroid/error.hpp"

namespace supertoroid {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using Vec3d = Vec3<double>;
using Vec2d = Vec2<double>;

template <typename Scalar>
struct ExponentBounds {
  Scalar lo = Scalar(0.1);
  Scalar hi = Scalar(2.5);
};

/// Shape parameters (a1, a2, a3, a4, eps1, eps2).
///
/// a1..a3 are the axis scales in meters, a4 the dimensionless hole ratio
/// (a4 > 1 gives a hole, 0 < a4 < 1 an apple shape, a4 = 0 merges with a
/// superellipsoid), eps1 the cross-section exponent, eps2 the equatorial one.
template <typename Scalar>
struct Intrinsics {
  Scalar a1 = 1;
  Scalar a2 = 1;
  Scalar a3 = 1;
  Scalar a4 = 2;
  Scalar eps1 = 1;
  Scalar eps2 = 1;

  bool has_hole() const { return a4 > Scalar(1); }
  bool apple_shaped() const { return a4 > Scalar(0) && a4 < Scalar(1); }

  template <typename Other>
  Intrinsics<Other> cast() const {
    return {Other(a1), Other(a2), Other(a3), Other(a4), Other(eps1), Other(eps2)};
  }

  bool operator==(const Intrinsics&) const = default;
};

using Intrinsicsd = Intrinsics<double>;

/// Throws InvalidArgument when the invariants of `i` do not hold.
template <typename Scalar>
void validate(const Intrinsics<Scalar>& i, const ExponentBounds<Scalar>& bounds = {}) {
  using std::isfinite;
  const bool finite = isfinite(i.a1) && isfinite(i.a2) && isfinite(i.a3) && isfinite(i.a4) &&
                      isfinite(i.eps1) && isfinite(i.eps2);
  if (!finite || !(i.a1 > 0) || !(i.a2 > 0) || !(i.a3 > 0) || !(i.a4 >= 0)) {
    throw Error(ErrorCode::InvalidArgument, "intrinsics require a1,a2,a3 > 0 and a4 >= 0");
  }
  if (i.eps1 < bounds.lo || i.eps1 > bounds.hi || i.eps2 < bounds.lo || i.eps2 > bounds.hi) {
    throw Error(ErrorCode::InvalidArgument, "exponent outside configured bounds");
  }
}

/// Rigid placement of the canonical frame: p_world = R p_canonical + t.
template <typename Scalar>
struct Pose {
  Vec3<Scalar> translation = Vec3<Scalar>::Zero();
  Eigen::Quaternion<Scalar> orientation = Eigen::Quaternion<Scalar>::Identity();

  Eigen::Matrix<Scalar, 3, 3> rotation() const { return orientation.toRotationMatrix(); }

  /// Canonical hole axis expressed in the world frame.
  Vec3<Scalar> axis() const { return rotation().col(2); }

  static Pose from_axis(const Vec3<Scalar>& center, const Vec3<Scalar>& axis) {
    Pose pose;
    pose.translation = center;
    pose.orientation = Eigen::Quaternion<Scalar>::FromTwoVectors(Vec3<Scalar>::UnitZ(), axis);
    return pose;
  }
};

using Posed = Pose<double>;

template <typename Scalar>
struct SupertoroidModel {
  Intrinsics<Scalar> intrinsics;
  Pose<Scalar> pose;
};

using Modeld = SupertoroidModel<double>;

/// Wraps an angle into [-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  if (a >= -pi && a <= pi) return a;
  Scalar r = std::remainder(a, Scalar(2) * pi);
  return r;
}

template <typename Scalar>
struct SurfaceParams {
  Scalar eta = 0;
  Scalar omega = 0;

  SurfaceParams() = default;
  SurfaceParams(Scalar eta_, Scalar omega_) : eta(wrap_angle(eta_)), omega(wrap_angle(omega_)) {}
};

using SurfaceParamsd = SurfaceParams<double>;

/// sign(x) |x|^e.
template <typename Scalar>
Scalar signed_power(Scalar x, Scalar e) {
  if (x == Scalar(0)) return Scalar(0);
  const Scalar m = std::pow(std::abs(x), e);
  return x < Scalar(0) ? -m : m;
}

template <typename Scalar>
Vec3<Scalar> param_point(const Intrinsics<Scalar>& i, const SurfaceParams<Scalar>& s) {
  const Scalar ring = i.a4 + signed_power(std::cos(s.eta), i.eps1);
  return {i.a1 * ring * signed_power(std::cos(s.omega), i.eps2),
          i.a2 * ring * signed_power(std::sin(s.omega), i.eps2),
          i.a3 * signed_power(std::sin(s.eta), i.eps1)};
}

/// Inside-outside function F_t: < 1 inside, = 1 on the surface, > 1 outside.
template <typename Scalar>
Scalar implicit_value(const Intrinsics<Scalar>& i, const Vec3<Scalar>& p) {
  using std::abs;
  using std::pow;
  const Scalar e2 = Scalar(2) / i.eps2;
  const Scalar e1 = Scalar(2) / i.eps1;
  const Scalar planar =
      pow(pow(abs(p.x() / i.a1), e2) + pow(abs(p.y() / i.a2), e2), i.eps2 / Scalar(2));
  return pow(abs(planar - i.a4), e1) + pow(abs(p.z() / i.a3), e1);
}

enum class Side { Inside, OnSurface, Outside };

template <typename Scalar>
Side classify(const Intrinsics<Scalar>& i, const Vec3<Scalar>& p, Scalar tol) {
  const Scalar f = implicit_value(i, p);
  if (std::abs(f - Scalar(1)) <= tol) return Side::OnSurface;
  return f < Scalar(1) ? Side::Inside : Side::Outside;
}

inline const char* to_string(Side s) {
  switch (s) {
    case Side::Inside: return "inside";
    case Side::OnSurface: return "on_surface";
    case Side::Outside: return "outside";
  }
  return "?";
}

/// Half-width of the cross-section superellipse at equatorial parameter
/// omega_s: sqrt(a1^2 cos^{2 eps2} + a2^2 sin^{2 eps2}).
template <typename Scalar>
Scalar cross_section_halfwidth(const Intrinsics<Scalar>& i, Scalar omega_s) {
  using std::abs;
  using std::pow;
  const Scalar c = pow(abs(std::cos(omega_s)), Scalar(2) * i.eps2);
  const Scalar s = pow(abs(std::sin(omega_s)), Scalar(2) * i.eps2);
  return std::sqrt(i.a1 * i.a1 * c + i.a2 * i.a2 * s);
}

/// Distance from the axis to the mean superellipse at parameter omega.
template <typename Scalar>
Scalar mean_superellipse_radius(const Intrinsics<Scalar>& i, Scalar omega) {
  if (!(i.a4 > Scalar(0))) {
    throw Error(ErrorCode::DegenerateMeanSuperellipse, "a4 = 0 collapses the mean superellipse");
  }
  return i.a4 * cross_section_halfwidth(i, omega);
}

/// Inside-outside function of the mean superellipse in the canonical x-y plane.
template <typename Scalar>
Scalar mean_superellipse_F(const Intrinsics<Scalar>& i, const Vec2<Scalar>& q) {
  if (!(i.a4 > Scalar(0))) {
    throw Error(ErrorCode::DegenerateMeanSuperellipse, "a4 = 0 collapses the mean superellipse");
  }
  const Scalar e = Scalar(2) / i.eps2;
  return std::pow(std::abs(q.x() / (i.a1 * i.a4)), e) +
         std::pow(std::abs(q.y() / (i.a2 * i.a4)), e);
}

/// Point of the mean superellipse at parameter omega.
template <typename Scalar>
Vec2<Scalar> mean_superellipse_point(const Intrinsics<Scalar>& i, Scalar omega) {
  return {i.a1 * i.a4 * signed_power(std::cos(omega), i.eps2),
          i.a2 * i.a4 * signed_power(std::sin(omega), i.eps2)};
}

/// Equatorial parameter omega_s whose mean-superellipse point lies in the
/// vertical half-plane through direction (x, y). Solves
/// tan^{eps2}(omega_s) = (a1/a2) tan(omega_pi) with the quadrant of (x, y).
/// Axis directions map to themselves exactly.
template <typename Scalar>
Scalar omega_s_from_direction(const Intrinsics<Scalar>& i, Scalar x, Scalar y) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar inv = Scalar(1) / i.eps2;
  const Scalar base =
      std::atan2(std::pow(i.a1 * std::abs(y), inv), std::pow(i.a2 * std::abs(x), inv));
  const Scalar folded = (x < Scalar(0)) ? pi - base : base;
  return y < Scalar(0) ? -folded : folded;
}

template <typename Scalar>
Scalar omega_s_from_omega_pi(const Intrinsics<Scalar>& i, Scalar omega_pi) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar w = wrap_angle(omega_pi);
  if (w == Scalar(0) || w == pi || w == -pi || w == pi / 2 || w == -pi / 2) return w;
  return omega_s_from_direction(i, std::cos(w), std::sin(w));
}

template <typename Scalar>
Vec3<Scalar> world_to_canonical(const Pose<Scalar>& pose, const Vec3<Scalar>& p_world) {
  return pose.orientation.conjugate() * (p_world - pose.translation);
}

template <typename Scalar>
Vec3<Scalar> canonical_to_world(const Pose<Scalar>& pose, const Vec3<Scalar>& p_canonical) {
  return pose.orientation * p_canonical + pose.translation;
}

template <typename Scalar>
Vec3<Scalar> world_to_canonical(const SupertoroidModel<Scalar>& m, const Vec3<Scalar>& p) {
  return world_to_canonical(m.pose, p);
}

template <typename Scalar>
Vec3<Scalar> canonical_to_world(const SupertoroidModel<Scalar>& m, const Vec3<Scalar>& p) {
  return canonical_to_world(m.pose, p);
}

/// Canonical-frame box [+-a1(1+a4)] x [+-a2(1+a4)] x [+-a3].
template <typename Scalar>
Eigen::AlignedBox<Scalar, 3> bounding_box(const Intrinsics<Scalar>& i) {
  const Vec3<Scalar> half(i.a1 * (Scalar(1) + i.a4), i.a2 * (Scalar(1) + i.a4), i.a3);
  return Eigen::AlignedBox<Scalar, 3>(-half, half);
}

}  // namespace supertoroid
