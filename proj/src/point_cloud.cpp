#include "supertoroid/point_cloud.hpp"

namespace supertoroid {

Vec3d PointCloud::centroid() const {
  Vec3d c = Vec3d::Zero();
  if (points.empty()) return c;
  for (const auto& p : points) c += p;
  return c / static_cast<double>(points.size());
}

PointCloud PointCloud::select(const std::vector<std::size_t>& indices) const {
  PointCloud out;
  out.normals_stale = normals_stale;
  out.points.reserve(indices.size());
  for (auto k : indices) out.points.push_back(points[k]);
  if (normals) {
    out.normals.emplace();
    out.normals->reserve(indices.size());
    for (auto k : indices) out.normals->push_back((*normals)[k]);
  }
  if (colors) {
    out.colors.emplace();
    out.colors->reserve(indices.size());
    for (auto k : indices) out.colors->push_back((*colors)[k]);
  }
  return out;
}

}  // namespace supertoroid
