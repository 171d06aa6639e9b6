#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "supertoroid/diffgeo.hpp"

using namespace supertoroid;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
const Intrinsicsd kTorus{1, 1, 1, 2, 1, 1};

Intrinsicsd random_intrinsics(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> a(0.4, 2.0), a4(1.2, 4.0), e(lo, hi);
  return {a(rng), a(rng), a(rng), a4(rng), e(rng), e(rng)};
}

// Interior grid: no sample closer than ~0.02 rad to a seam.
double grid_angle(int k, int n) { return -kPi + (k + 0.37) * 2 * kPi / n; }

Vec3d fd_eta(const Intrinsicsd& i, double eta, double w, double h = 1e-6) {
  SurfaceParamsd p, m;
  p.eta = eta + h, p.omega = w;
  m.eta = eta - h, m.omega = w;
  return (param_point(i, p) - param_point(i, m)) / (2 * h);
}

Vec3d fd_omega(const Intrinsicsd& i, double eta, double w, double h = 1e-6) {
  SurfaceParamsd p, m;
  p.eta = eta, p.omega = w + h;
  m.eta = eta, m.omega = w - h;
  return (param_point(i, p) - param_point(i, m)) / (2 * h);
}

Vec3d fd_gradient(const Intrinsicsd& i, const Vec3d& p, double h = 1e-7) {
  Vec3d g;
  for (int k = 0; k < 3; ++k) {
    Vec3d d = Vec3d::Zero();
    d[k] = h;
    g[k] = (implicit_value(i, Vec3d(p + d)) - implicit_value(i, Vec3d(p - d))) / (2 * h);
  }
  return g;
}

void check_vec(const Vec3d& got, const Vec3d& want, double tol) {
  INFO("got " << got.transpose() << " want " << want.transpose());
  CHECK((got - want).norm() < tol);
}

}  // namespace

TEST_CASE("tangent examples") {
  const Vec3d tw = tangent_omega(kTorus, SurfaceParamsd(0.0, kPi / 4));
  check_vec(tw, Vec3d(-3 / std::sqrt(2.0), 3 / std::sqrt(2.0), 0), 1e-12);

  const Vec3d te = tangent_eta(kTorus, SurfaceParamsd(kPi / 4, 0.0)).normalized();
  check_vec(te, Vec3d(-1, 0, 1) / std::sqrt(2.0), 1e-12);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  const auto i = random_intrinsics(rng, 0.4, 1.9);
  for (int k = 0; k < 20; ++k) {
    CHECK(tangent_omega(i, SurfaceParamsd(ang(rng), ang(rng))).z() == 0.0);
    CHECK(tangent_eta(i, SurfaceParamsd(ang(rng), 0.0)).y() == 0.0);
  }
}

TEST_CASE("generic point against mpmath reference") {
  // tests/oracles/derive_values.py
  const Intrinsicsd i{1, 2, 0.5, 3, 0.7, 1.2};
  const SurfaceParamsd s(0.6, 0.9);
  check_vec(tangent_eta(i, s), Vec3d(-0.23664861764398353, -0.62466052028306718, 0.34289927551140946),
            1e-13);
  check_vec(tangent_omega(i, s), Vec3d(-3.311439537647844, 5.5043591716937456, 0.0), 1e-12);
  check_vec(normal(i, s), Vec3d(0.46870339476362833, 0.28197341496747805, 0.83714283189228158),
            1e-13);

  const auto [k_omega, k_eta] = normal_curvatures(i, s);
  CHECK(k_omega == Approx(0.11298007692090043).epsilon(1e-12));
  CHECK(k_eta == Approx(1.509398610425051).epsilon(1e-12));

  const auto f = fundamental_forms(i, s);
  CHECK(f.E() == Approx(0.56378324697936998).epsilon(1e-13));
  CHECK(f.F() == Approx(-2.6547082750190936).epsilon(1e-13));
  CHECK(f.G() == Approx(41.263601702506424).epsilon(1e-13));
  CHECK(f.L() == Approx(0.800765498658894).epsilon(1e-8));
  CHECK(std::abs(f.M()) < 1e-8);
  CHECK(f.N() == Approx(2.5500218369075396).epsilon(1e-8));

  const auto c = principal_and_mean_curvature(f);
  CHECK(c.k1 == Approx(2.0653000471806963).epsilon(1e-7));
  CHECK(c.k2 == Approx(0.06096992082770573).epsilon(1e-7));
  CHECK(c.mean_H == Approx(1.063134984004201).epsilon(1e-7));
  CHECK(c.gauss_K == Approx(0.12592118036206396).epsilon(1e-7));

  // Coordinate curves are not orthogonal in general.
  CHECK(std::abs(f.F()) > 0.1);
}

TEST_CASE("tangents match finite differences") {
  std::mt19937_64 rng(17);
  constexpr int n = 50;
  double worst = 0.0;
  for (int m = 0; m < 20; ++m) {
    const auto i = random_intrinsics(rng, 0.4, 1.9);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const double eta = grid_angle(a, n), w = grid_angle(b, n);
        SurfaceParamsd s;
        s.eta = eta, s.omega = w;
        const Vec3d te = tangent_eta(i, s), tw = tangent_omega(i, s);
        worst = std::max(worst, (te - fd_eta(i, eta, w)).norm() / te.norm());
        worst = std::max(worst, (tw - fd_omega(i, eta, w)).norm() / tw.norm());
      }
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("normal is orthogonal and outward") {
  std::mt19937_64 rng(23);
  constexpr int n = 50;
  double worst_dot = 0.0;
  int inward = 0;
  for (int m = 0; m < 20; ++m) {
    const auto i = random_intrinsics(rng, 0.4, 1.9);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const SurfaceParamsd s(grid_angle(a, n), grid_angle(b, n));
        const auto frame = local_frame(i, s);
        worst_dot = std::max({worst_dot, std::abs(frame.normal.dot(frame.t_eta)),
                              std::abs(frame.normal.dot(frame.t_omega))});
        CHECK(frame.normal.norm() == Approx(1.0).epsilon(1e-12));
        if (frame.normal.dot(fd_gradient(i, frame.point)) <= 0.0) ++inward;
        const Vec3d cross = tangent_omega(i, s).cross(tangent_eta(i, s)).normalized();
        CHECK((cross - frame.normal).norm() < 1e-8);
      }
    }
  }
  CHECK(worst_dot < 1e-8);
  CHECK(inward == 0);
}

TEST_CASE("normal examples") {
  check_vec(normal(kTorus, SurfaceParamsd(0, 0)), Vec3d(1, 0, 0), 1e-15);
  check_vec(normal(kTorus, SurfaceParamsd(kPi / 2, 0.7)), Vec3d(0, 0, 1), 1e-15);
  const Intrinsicsd sharp{1, 2, 0.5, 3, 2.5, 1.0};
  CHECK_THROWS_AS(normal(sharp, SurfaceParamsd(0.0, 0.4)), Error);
  CHECK_THROWS_AS(normal(sharp, SurfaceParamsd(kPi / 2, 0.4)), Error);
  CHECK_NOTHROW(normal(sharp, SurfaceParamsd(0.4, 0.0)));
  try {
    normal(Intrinsicsd{1, 2, 0.5, 3, 1.0, 2.0}, SurfaceParamsd(0.3, kPi / 2));
    FAIL("expected CuspPoint");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CuspPoint);
  }
}

TEST_CASE("unit tangents at seams match the tabulated limits") {
  const double a1 = 1.3, a2 = 0.7, a3 = 0.5, a4 = 2.2;
  const double a12 = std::hypot(a1, a2);
  const double eta = 0.45, w = 0.7;
  for (double e : {1.5, 2.0, 2.5}) {
    CAPTURE(e);
    const Intrinsicsd i{a1, a2, a3, a4, e, e};
    const auto t0 = unit_tangents(i, SurfaceParamsd(eta, 0.0));
    const auto t90 = unit_tangents(i, SurfaceParamsd(eta, kPi / 2));
    if (e < 2) {
      check_vec(t0.t_omega, Vec3d(0, 1, 0), 1e-9);
      check_vec(t90.t_omega, Vec3d(-1, 0, 0), 1e-9);
    } else if (e == 2) {
      check_vec(t0.t_omega, Vec3d(-a1 / a12, a2 / a12, 0), 1e-9);
      check_vec(t90.t_omega, Vec3d(-a1 / a12, a2 / a12, 0), 1e-9);
    } else {
      check_vec(t0.t_omega, Vec3d(-1, 0, 0), 1e-9);
      check_vec(t90.t_omega, Vec3d(0, 1, 0), 1e-9);
    }

    const double cw = signed_power(std::cos(w), e), sw = signed_power(std::sin(w), e);
    const double aw = std::hypot(a1 * cw, a2 * sw);
    const Vec3d flat(-a1 * cw / aw, -a2 * sw / aw, 0);
    const double slant = std::hypot(a3, aw);
    const Vec3d diag(-a1 * cw / slant, -a2 * sw / slant, a3 / slant);
    const auto e0 = unit_tangents(i, SurfaceParamsd(0.0, w));
    const auto e90 = unit_tangents(i, SurfaceParamsd(kPi / 2, w));
    if (e < 2) {
      check_vec(e0.t_eta, Vec3d(0, 0, 1), 1e-9);
      check_vec(e90.t_eta, flat, 1e-9);
    } else if (e == 2) {
      check_vec(e0.t_eta, diag, 1e-9);
      check_vec(e90.t_eta, diag, 1e-9);
    } else {
      check_vec(e0.t_eta, flat, 1e-9);
      check_vec(e90.t_eta, Vec3d(0, 0, 1), 1e-9);
    }
  }
}

TEST_CASE("seam limits agree with nearby interior tangents for eps < 2") {
  const Intrinsicsd i{1.3, 0.7, 0.5, 2.2, 1.5, 1.5};
  const double d = 1e-10;
  const auto seam = unit_tangents(i, SurfaceParamsd(0.45, 0.0));
  const Vec3d near = tangent_omega(i, SurfaceParamsd(0.45, d)).normalized();
  CHECK((seam.t_omega - near).norm() < 1e-4);
  for (double w : {-2.5, -1.0, 1.2, 2.8}) {
    CAPTURE(w);
    const auto s = unit_tangents(i, SurfaceParamsd(0.0, w));
    const Vec3d up = tangent_eta(i, SurfaceParamsd(d, w)).normalized();
    CHECK((s.t_eta - up).norm() < 1e-4);
  }
}

TEST_CASE("circular torus closed forms") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ang(-kPi, kPi), a4d(1.2, 4.0);
  for (int m = 0; m < 10; ++m) {
    const Intrinsicsd i{1, 1, 1, a4d(rng), 1, 1};
    for (int k = 0; k < 50; ++k) {
      const SurfaceParamsd s(ang(rng), ang(rng));
      const auto [k_omega, k_eta] = normal_curvatures(i, s);
      CHECK(k_eta == Approx(1.0).epsilon(1e-12));
      CHECK(k_omega == Approx(1.0 / (i.a4 + std::cos(s.eta))).epsilon(1e-12));
      const auto f = fundamental_forms(i, s);
      CHECK(std::abs(f.F()) < 1e-12);
      const auto c = principal_and_mean_curvature(f);
      const double ring = std::cos(s.eta) / (i.a4 + std::cos(s.eta));
      CHECK(std::max(c.k1, c.k2) == Approx(std::max(1.0, ring)).epsilon(1e-7));
      CHECK(std::min(c.k1, c.k2) == Approx(std::min(1.0, ring)).epsilon(1e-7));
    }
  }

  const auto c = curvature_info(kTorus, SurfaceParamsd(0.0, 0.0));
  CHECK(c.k1 == Approx(1.0).epsilon(1e-8));
  CHECK(c.k2 == Approx(1.0 / 3.0).epsilon(1e-8));
  CHECK(c.mean_H == Approx(2.0 / 3.0).epsilon(1e-8));
  CHECK(normal_curvatures(kTorus, SurfaceParamsd(0.0, kPi / 4)).first == Approx(1.0 / 3.0));

  // Scaled tube: k_eta = 1/a3 when a1 = a2 = a3.
  const Intrinsicsd big{2.5, 2.5, 2.5, 1.8, 1, 1};
  CHECK(normal_curvatures(big, SurfaceParamsd(0.3, 1.1)).second == Approx(1 / 2.5).epsilon(1e-12));
}

TEST_CASE("second form on coordinate directions") {
  // On the circular torus the coordinate curves are lines of curvature, so
  // II/I along them equals the normal-section curvatures.
  const Intrinsicsd i{1, 1, 1, 2.5, 1, 1};
  const SurfaceParamsd s(0.8, -0.4);
  const auto f = fundamental_forms(i, s);
  const auto [k_omega, k_eta] = normal_curvatures(i, s);
  CHECK(f.normal_curvature(1, 0) == Approx(k_eta).epsilon(1e-6));
  CHECK(f.normal_curvature(0, 1) == Approx(k_omega * std::cos(s.eta)).epsilon(1e-6));
}

TEST_CASE("principal curvatures bracket normal curvatures") {
  std::mt19937_64 rng(41);
  constexpr int n = 12;
  for (int m = 0; m < 10; ++m) {
    const auto i = random_intrinsics(rng, 0.4, 1.9);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const auto c = curvature_info(i, SurfaceParamsd(grid_angle(a, n), grid_angle(b, n)));
        CHECK(c.k1 >= c.k2);
        CHECK(c.mean_H == Approx((c.k1 + c.k2) / 2));
        const double scale = 1.0 + std::abs(c.k1) + std::abs(c.k2);
        for (int d = 0; d < 8; ++d) {
          const double phi = d * kPi / 8;
          const double kn = c.forms.normal_curvature(std::cos(phi), std::sin(phi));
          CHECK(kn <= c.k1 + 1e-6 * scale);
          CHECK(kn >= c.k2 - 1e-6 * scale);
        }
        // det(II - k I) = 0 at both principal curvatures.
        for (double k : {c.k1, c.k2}) {
          const double det = (c.forms.second - k * c.forms.first).determinant();
          CHECK(std::abs(det) < 1e-6 * c.forms.first.determinant() * scale * scale);
        }
      }
    }
  }
}

TEST_CASE("seam errors") {
  const Intrinsicsd i{1, 2, 0.5, 3, 0.7, 1.2};
  CHECK_THROWS_AS(normal_curvatures(i, SurfaceParamsd(0.0, 0.5)), Error);
  CHECK_THROWS_AS(fundamental_forms(i, SurfaceParamsd(0.5, kPi / 2)), Error);
  try {
    tangent_eta(i, SurfaceParamsd(0.0, 0.5));
    FAIL("expected SeamSingularity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SeamSingularity);
  }
  CHECK_NOTHROW(unit_tangents(i, SurfaceParamsd(0.0, 0.0)));

  FundamentalForms<double> flat;
  flat.first << 1, 1, 1, 1;
  flat.second.setZero();
  CHECK_THROWS_AS(principal_and_mean_curvature(flat), Error);
}

TEST_CASE("surface_params_of inverts param_point") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int m = 0; m < 20; ++m) {
    const auto i = random_intrinsics(rng, 0.3, 2.4);
    for (int k = 0; k < 100; ++k) {
      const Vec3d p = param_point(i, SurfaceParamsd(ang(rng), ang(rng)));
      const Vec3d q = param_point(i, surface_params_of(i, p));
      CHECK((p - q).norm() < 1e-9 * (1 + p.norm()));
    }
  }
}
