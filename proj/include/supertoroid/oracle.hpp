#pragma once

// Brute-force Euclidean distance to a supertoroid, used to validate the
// meridian distance. Independent of the meridian construction: it only
// evaluates param_point.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "supertoroid/geometry.hpp"

namespace supertoroid {

/// Caches a grid_n x grid_n (eta, omega) sampling of one surface and answers
/// closest-point queries: grid minimum, then pattern-search refinement of the
/// best few grid cells.
template <typename Scalar>
class DistanceOracle {
 public:
  DistanceOracle(const Intrinsics<Scalar>& i, int grid_n, int refine_candidates = 4)
      : intrinsics_(i), grid_n_(std::max(grid_n, 64)), candidates_(refine_candidates) {
    constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    step_ = two_pi / Scalar(grid_n_);
    samples_.resize(3, grid_n_ * grid_n_);
    for (int a = 0; a < grid_n_; ++a) {
      for (int b = 0; b < grid_n_; ++b) {
        samples_.col(a * grid_n_ + b) = param_point(intrinsics_, {angle(a), angle(b)});
      }
    }
  }

  Scalar distance(const Vec3<Scalar>& p) const {
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> d2 =
        (samples_.colwise() - p).colwise().squaredNorm();

    const int k = std::min<int>(candidates_, static_cast<int>(d2.size()));
    std::vector<int> idx(d2.size());
    for (int n = 0; n < static_cast<int>(idx.size()); ++n) idx[n] = n;
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                      [&](int l, int r) { return d2[l] < d2[r]; });

    Scalar best = d2[idx[0]];
    for (int c = 0; c < k; ++c) {
      const int a = idx[c] / grid_n_;
      const int b = idx[c] % grid_n_;
      best = std::min(best, refine(p, angle(a), angle(b), d2[idx[c]]));
    }
    return std::sqrt(best);
  }

  int grid_n() const { return grid_n_; }

 private:
  Scalar angle(int k) const { return -std::numbers::pi_v<Scalar> + step_ * Scalar(k); }

  Scalar dist2(const Vec3<Scalar>& p, Scalar eta, Scalar omega) const {
    return (param_point(intrinsics_, SurfaceParams<Scalar>(eta, omega)) - p).squaredNorm();
  }

  Scalar refine(const Vec3<Scalar>& p, Scalar eta, Scalar omega, Scalar f) const {
    static constexpr std::array<std::array<int, 2>, 8> kMoves{
        {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
    Scalar h = step_;
    while (h > Scalar(1e-13)) {
      bool moved = false;
      for (const auto& m : kMoves) {
        const Scalar e = eta + h * m[0];
        const Scalar w = omega + h * m[1];
        const Scalar g = dist2(p, e, w);
        if (g < f) {
          f = g;
          eta = e;
          omega = w;
          moved = true;
          break;
        }
      }
      if (!moved) h *= Scalar(0.5);
    }
    return f;
  }

  Intrinsics<Scalar> intrinsics_;
  int grid_n_;
  int candidates_;
  Scalar step_;
  Eigen::Matrix<Scalar, 3, Eigen::Dynamic> samples_;
};

/// One-shot oracle query. Prefer DistanceOracle for repeated queries.
template <typename Scalar>
Scalar oracle_distance(const Intrinsics<Scalar>& i, const Vec3<Scalar>& p, int grid_n) {
  return DistanceOracle<Scalar>(i, grid_n).distance(p);
}

}  // namespace supertoroid
