#pragma once

// Synthetic supertoroid clouds: surface sampling, single-view culling,
// noise and random downsampling. Every stochastic operation is a pure
// function of its inputs and seed.

#include <cstdint>

#include "supertoroid/geometry.hpp"
#include "supertoroid/point_cloud.hpp"

namespace supertoroid {

enum class SamplingMode {
  UniformAngle,
  /// Equal arc-length steps along each coordinate curve (Pilu-Fisher style).
  ArclengthAdaptive,
};

struct CameraView {
  Vec3d position = Vec3d(0, 0, 10);
  Vec3d look_at = Vec3d::Zero();
};

/// n_eta * n_omega world-frame points with analytic normals. Point
/// (j, k) sits at index j * n_omega + k, j indexing eta and k omega.
/// Parameters are offset by half a step so no sample falls on a seam.
PointCloud sample_surface(const Modeld& model, int n_eta, int n_omega,
                          SamplingMode mode = SamplingMode::UniformAngle);

/// Back-face culling: keeps points whose normal faces the camera.
PointCloud partial_view(const PointCloud& cloud, const CameraView& camera);

/// Isotropic Gaussian perturbation (per-coordinate sigma). Normals are kept
/// and marked stale.
PointCloud add_noise(const PointCloud& cloud, double sigma, std::uint64_t seed);

/// Uniform random subset of size n without replacement, in input order.
PointCloud downsample_random(const PointCloud& cloud, std::size_t n, std::uint64_t seed);

namespace detail {
/// n parameters in [-pi, pi) splitting the closed planar curve
/// (a cos^e t, b sin^e t) into equal arc-length steps, half-step offset.
std::vector<double> equal_arclength_params(double a, double b, double e, int n);
}  // namespace detail

}  // namespace supertoroid
