#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "supertoroid/geometry.hpp"

namespace supertoroid {

using Rgb = std::array<std::uint8_t, 3>;

/// World-frame points in meters with optional per-point normals and colors.
struct PointCloud {
  std::vector<Vec3d> points;
  std::optional<std::vector<Vec3d>> normals;
  std::optional<std::vector<Rgb>> colors;
  /// Set once points were moved after the normals were computed.
  bool normals_stale = false;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return normals.has_value(); }

  Vec3d centroid() const;

  /// Subset in the given index order; carries normals and colors along.
  PointCloud select(const std::vector<std::size_t>& indices) const;
};

}  // namespace supertoroid
