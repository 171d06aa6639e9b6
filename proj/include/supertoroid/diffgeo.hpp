#pragma once

// Differential geometry of the supertoroid surface r_t(eta, omega).
//
// Seams are the parameter loci where sin or cos of eta or omega vanishes.
// There the raw tangent expressions contain 0^(eps-1); unit tangents use the
// one-sided limits (vanishing factor taken as +0), which reproduce the
// tabulated first-quadrant values for eps < 2, eps = 2 and eps > 2.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <tuple>
#include <utility>

#include "supertoroid/geometry.hpp"

namespace supertoroid {

template <typename Scalar>
struct DiffGeoOptions {
  Scalar seam_tol = Scalar(1e-7);
  /// Central-difference step (rad) for the second fundamental form.
  Scalar fd_step = Scalar(1e-5);
};

namespace detail {

/// d/du sign(u)|u|^e = e |u|^(e-1).
template <typename Scalar>
Scalar signed_power_slope(Scalar u, Scalar e) {
  return e * std::pow(std::abs(u), e - Scalar(1));
}

template <typename Scalar>
int sign_of(Scalar v) {
  return v < Scalar(0) ? -1 : 1;
}

template <typename Scalar>
bool is_two(Scalar e) {
  return std::abs(e - Scalar(2)) < Scalar(1e-12);
}

template <typename Scalar>
bool at_seam(Scalar angle, Scalar tol) {
  return std::abs(std::sin(angle)) < tol || std::abs(std::cos(angle)) < tol;
}

/// Curvature of the planar superellipse (a cos^e t, b sin^e t).
template <typename Scalar>
Scalar superellipse_curvature(Scalar a, Scalar b, Scalar e, Scalar t) {
  using std::abs;
  using std::pow;
  const Scalar c = abs(std::cos(t));
  const Scalar s = abs(std::sin(t));
  const Scalar num = a * b * abs(e - Scalar(2)) * pow(c, e - Scalar(1)) * pow(s, e - Scalar(1));
  const Scalar den = a * a * pow(c, Scalar(2) * e - Scalar(2)) * s * s +
                     b * b * c * c * pow(s, Scalar(2) * e - Scalar(2));
  return num / (e * pow(den, Scalar(1.5)));
}

}  // namespace detail

/// Raw derivative dr_t/d(omega).
template <typename Scalar>
Vec3<Scalar> tangent_omega(const Intrinsics<Scalar>& i, const SurfaceParams<Scalar>& s,
                           const DiffGeoOptions<Scalar>& opt = {}) {
  const Scalar cw = std::cos(s.omega), sw = std::sin(s.omega);
  if (i.eps2 < Scalar(1) && detail::at_seam(s.omega, opt.seam_tol)) {
    throw Error(ErrorCode::SeamSingularity, "omega tangent unbounded at seam for eps2 < 1");
  }
  const Scalar ring = i.a4 + signed_power(std::cos(s.eta), i.eps1);
  return {-i.a1 * ring * detail::signed_power_slope(cw, i.eps2) * sw,
          i.a2 * ring * detail::signed_power_slope(sw, i.eps2) * cw, Scalar(0)};
}

/// Raw derivative dr_t/d(eta).
template <typename Scalar>
Vec3<Scalar> tangent_eta(const Intrinsics<Scalar>& i, const SurfaceParams<Scalar>& s,
                         const DiffGeoOptions<Scalar>& opt = {}) {
  const Scalar ce = std::cos(s.eta), se = std::sin(s.eta);
  if (i.eps1 < Scalar(1) && detail::at_seam(s.eta, opt.seam_tol)) {
    throw Error(ErrorCode::SeamSingularity, "eta tangent unbounded at seam for eps1 < 1");
  }
  const Scalar radial = -detail::signed_power_slope(ce, i.eps1) * se;
  return {i.a1 * radial * signed_power(std::cos(s.omega), i.eps2),
          i.a2 * radial * signed_power(std::sin(s.omega), i.eps2),
          i.a3 * detail::signed_power_slope(se, i.eps1) * ce};
}

template <typename Scalar>
struct UnitTangents {
  Vec3<Scalar> t_omega;
  Vec3<Scalar> t_eta;
};

template <typename Scalar>
UnitTangents<Scalar> unit_tangents(const Intrinsics<Scalar>& i, const SurfaceParams<Scalar>& s,
                                   const DiffGeoOptions<Scalar>& opt = {}) {
  using detail::is_two;
  using detail::sign_of;
  const Scalar tol = opt.seam_tol;
  UnitTangents<Scalar> out;

  const Scalar cw = std::cos(s.omega), sw = std::sin(s.omega);
  const Scalar ring = i.a4 + signed_power(std::cos(s.eta), i.eps1);
  const Scalar ring_sign = Scalar(sign_of(ring));
  const Scalar a12 = std::hypot(i.a1, i.a2);
  if (std::abs(sw) < tol) {
    const Scalar sc = Scalar(sign_of(cw));
    if (i.eps2 < Scalar(2) && !is_two(i.eps2)) {
      out.t_omega = Vec3<Scalar>(0, sc, 0);
    } else if (is_two(i.eps2)) {
      out.t_omega = Vec3<Scalar>(-i.a1 / a12, sc * i.a2 / a12, 0);
    } else {
      out.t_omega = Vec3<Scalar>(-1, 0, 0);
    }
    out.t_omega *= ring_sign;
  } else if (std::abs(cw) < tol) {
    const Scalar ss = Scalar(sign_of(sw));
    if (i.eps2 < Scalar(2) && !is_two(i.eps2)) {
      out.t_omega = Vec3<Scalar>(-ss, 0, 0);
    } else if (is_two(i.eps2)) {
      out.t_omega = Vec3<Scalar>(-ss * i.a1 / a12, i.a2 / a12, 0);
    } else {
      out.t_omega = Vec3<Scalar>(0, 1, 0);
    }
    out.t_omega *= ring_sign;
  } else {
    out.t_omega = tangent_omega(i, s, opt).normalized();
  }

  const Scalar ce = std::cos(s.eta), se = std::sin(s.eta);
  const Vec3<Scalar> h(i.a1 * signed_power(cw, i.eps2), i.a2 * signed_power(sw, i.eps2), 0);
  const Scalar aw = h.norm();
  const Scalar slant = std::hypot(aw, i.a3);
  if (std::abs(se) < tol) {
    const Scalar sc = Scalar(sign_of(ce));
    if (i.eps1 < Scalar(2) && !is_two(i.eps1)) {
      out.t_eta = Vec3<Scalar>(0, 0, sc);
    } else if (is_two(i.eps1)) {
      out.t_eta = (Vec3<Scalar>(0, 0, sc * i.a3) - h) / slant;
    } else {
      out.t_eta = -h / aw;
    }
  } else if (std::abs(ce) < tol) {
    const Scalar ss = Scalar(sign_of(se));
    if (i.eps1 < Scalar(2) && !is_two(i.eps1)) {
      out.t_eta = -ss * h / aw;
    } else if (is_two(i.eps1)) {
      out.t_eta = (Vec3<Scalar>(0, 0, i.a3) - ss * h) / slant;
    } else {
      out.t_eta = Vec3<Scalar>(0, 0, 1);
    }
  } else {
    out.t_eta = tangent_eta(i, s, opt).normalized();
  }
  return out;
}

/// Outward unit normal (Gauss map). Evaluated as t_omega x t_eta with the
/// common factor cos^(eps-1) sin^(eps-1) of both angles divided out, which
/// keeps it finite on seams; the remaining magnitude is the normalizer m_n.
/// Assumes a4 + cos^eps1(eta) > 0 (true whenever a4 > 1). For eps >= 2 the
/// seams are corners of the cross-section or equatorial curve and throw CuspPoint.
template <typename Scalar>
Vec3<Scalar> normal(const Intrinsics<Scalar>& i, const SurfaceParams<Scalar>& s,
                    const DiffGeoOptions<Scalar>& opt = {}) {
  auto corner = [&](Scalar e, Scalar angle) {
    return (e > Scalar(2) || detail::is_two(e)) && detail::at_seam(angle, opt.seam_tol);
  };
  if (corner(i.eps1, s.eta) || corner(i.eps2, s.omega)) {
    throw Error(ErrorCode::CuspPoint, "normal undefined at a corner seam");
  }
  const Scalar ke = Scalar(2) - i.eps1;
  const Scalar kw = Scalar(2) - i.eps2;
  const Scalar ce = signed_power(std::cos(s.eta), ke);
  const Vec3<Scalar> n(i.a2 * i.a3 * ce * signed_power(std::cos(s.omega), kw),
                       i.a1 * i.a3 * ce * signed_power(std::sin(s.omega), kw),
                       i.a1 * i.a2 * signed_power(std::sin(s.eta), ke));
  const Scalar m = n.norm();
  if (!std::isfinite(m) || m < Scalar(1e-12)) {
    throw Error(ErrorCode::CuspPoint, "normal undefined at cusp");
  }
  return n / m;
}

template <typename Scalar>
struct LocalFrame {
  Vec3<Scalar> point;
  Vec3<Scalar> t_omega;
  Vec3<Scalar> t_eta;
  Vec3<Scalar> normal;
};

template <typename Scalar>
LocalFrame<Scalar> local_frame(const Intrinsics<Scalar>& i, const SurfaceParams<Scalar>& s,
                               const DiffGeoOptions<Scalar>& opt = {}) {
  const auto t = unit_tangents(i, s, opt);
  return {param_point(i, s), t.t_omega, t.t_eta, normal(i, s, opt)};
}

/// Curvatures of the omega and eta coordinate curves (non-negative).
template <typename Scalar>
std::pair<Scalar, Scalar> normal_curvatures(const Intrinsics<Scalar>& i,
                                            const SurfaceParams<Scalar>& s,
                                            const DiffGeoOptions<Scalar>& opt = {}) {
  if ((i.eps2 != Scalar(1) && detail::at_seam(s.omega, opt.seam_tol)) ||
      (i.eps1 != Scalar(1) && detail::at_seam(s.eta, opt.seam_tol))) {
    throw Error(ErrorCode::SeamSingularity, "coordinate-curve curvature undefined at seam");
  }
  const Scalar ring = std::abs(i.a4 + signed_power(std::cos(s.eta), i.eps1));
  const Scalar k_omega = detail::superellipse_curvature(i.a1, i.a2, i.eps2, s.omega) / ring;
  const Scalar aw = cross_section_halfwidth(i, s.omega);
  const Scalar k_eta = detail::superellipse_curvature(aw, i.a3, i.eps1, s.eta);
  return {k_omega, k_eta};
}

/// First form (E, F, G) with E = t_eta.t_eta, F = t_eta.t_omega, G = t_omega.t_omega;
/// second form (L, M, N) on the same (eta, omega) ordering. Curvature sign:
/// positive where the surface bends away from the outward normal.
template <typename Scalar>
struct FundamentalForms {
  Eigen::Matrix<Scalar, 2, 2> first;
  Eigen::Matrix<Scalar, 2, 2> second;

  Scalar E() const { return first(0, 0); }
  Scalar F() const { return first(0, 1); }
  Scalar G() const { return first(1, 1); }
  Scalar L() const { return second(0, 0); }
  Scalar M() const { return second(0, 1); }
  Scalar N() const { return second(1, 1); }

  /// Normal curvature along parameter direction (d_eta, d_omega).
  Scalar normal_curvature(Scalar d_eta, Scalar d_omega) const {
    const Eigen::Matrix<Scalar, 2, 1> d(d_eta, d_omega);
    return d.dot(second * d) / d.dot(first * d);
  }
};

template <typename Scalar>
FundamentalForms<Scalar> fundamental_forms(const Intrinsics<Scalar>& i,
                                           const SurfaceParams<Scalar>& s,
                                           const DiffGeoOptions<Scalar>& opt = {}) {
  // The parametrization is only C2 across a seam for unit exponent.
  if ((i.eps2 != Scalar(1) && detail::at_seam(s.omega, opt.seam_tol)) ||
      (i.eps1 != Scalar(1) && detail::at_seam(s.eta, opt.seam_tol))) {
    throw Error(ErrorCode::SeamSingularity, "second fundamental form undefined at seam");
  }
  const Vec3<Scalar> te = tangent_eta(i, s, opt);
  const Vec3<Scalar> tw = tangent_omega(i, s, opt);
  const Vec3<Scalar> n = normal(i, s, opt);
  const Scalar h = opt.fd_step;

  // SurfaceParams wraps its angles, so keep the raw values here.
  auto at = [&](Scalar de, Scalar dw) {
    SurfaceParams<Scalar> q;
    q.eta = s.eta + de;
    q.omega = s.omega + dw;
    return q;
  };
  const Vec3<Scalar> r_ee = (tangent_eta(i, at(h, 0), opt) - tangent_eta(i, at(-h, 0), opt)) / (2 * h);
  const Vec3<Scalar> r_ww =
      (tangent_omega(i, at(0, h), opt) - tangent_omega(i, at(0, -h), opt)) / (2 * h);
  const Vec3<Scalar> r_ew =
      ((tangent_eta(i, at(0, h), opt) - tangent_eta(i, at(0, -h), opt)) +
       (tangent_omega(i, at(h, 0), opt) - tangent_omega(i, at(-h, 0), opt))) /
      (4 * h);

  FundamentalForms<Scalar> f;
  f.first << te.dot(te), te.dot(tw), te.dot(tw), tw.dot(tw);
  f.second << -r_ee.dot(n), -r_ew.dot(n), -r_ew.dot(n), -r_ww.dot(n);
  return f;
}

template <typename Scalar>
struct CurvatureInfo {
  Scalar k_omega = 0;
  Scalar k_eta = 0;
  Scalar k1 = 0;
  Scalar k2 = 0;
  Scalar mean_H = 0;
  Scalar gauss_K = 0;
  FundamentalForms<Scalar> forms;
};

/// Principal curvatures k1 >= k2 (eigenvalues of I^-1 II) and their mean.
template <typename Scalar>
CurvatureInfo<Scalar> principal_and_mean_curvature(const FundamentalForms<Scalar>& f) {
  const Scalar det_i = f.E() * f.G() - f.F() * f.F();
  if (!(det_i > Scalar(1e-14))) {
    throw Error(ErrorCode::DegenerateMetric, "first fundamental form is singular");
  }
  CurvatureInfo<Scalar> c;
  c.forms = f;
  c.mean_H = (f.E() * f.N() - Scalar(2) * f.F() * f.M() + f.G() * f.L()) / (Scalar(2) * det_i);
  c.gauss_K = (f.L() * f.N() - f.M() * f.M()) / det_i;
  const Scalar disc = std::sqrt(std::max(Scalar(0), c.mean_H * c.mean_H - c.gauss_K));
  c.k1 = c.mean_H + disc;
  c.k2 = c.mean_H - disc;
  return c;
}

template <typename Scalar>
CurvatureInfo<Scalar> curvature_info(const Intrinsics<Scalar>& i, const SurfaceParams<Scalar>& s,
                                     const DiffGeoOptions<Scalar>& opt = {}) {
  auto c = principal_and_mean_curvature(fundamental_forms(i, s, opt));
  std::tie(c.k_omega, c.k_eta) = normal_curvatures(i, s, opt);
  return c;
}

/// Surface parameters of a point lying on the surface (inverse of param_point).
template <typename Scalar>
SurfaceParams<Scalar> surface_params_of(const Intrinsics<Scalar>& i, const Vec3<Scalar>& p) {
  const Scalar ws = omega_s_from_direction(i, p.x(), p.y());
  // a4 + cos^eps1(eta), read off whichever planar coordinate is better conditioned.
  const Scalar rho_scale =
      std::abs(signed_power(std::cos(ws), i.eps2)) > std::abs(signed_power(std::sin(ws), i.eps2))
          ? p.x() / (i.a1 * signed_power(std::cos(ws), i.eps2))
          : p.y() / (i.a2 * signed_power(std::sin(ws), i.eps2));
  const Scalar inv = Scalar(1) / i.eps1;
  const Scalar eta =
      std::atan2(signed_power(p.z() / i.a3, inv), signed_power(rho_scale - i.a4, inv));
  return {eta, ws};
}

}  // namespace supertoroid
