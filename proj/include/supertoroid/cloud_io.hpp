#pragma once

// ASCII point-cloud files.
//
// xyz: one point per line, "x y z" or "x y z nx ny nz", '#' starts a comment.
// PLY: ASCII 1.0, vertex element with float/double x, y, z and optional
// nx, ny, nz and uchar red, green, blue. Other elements are skipped.

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "supertoroid/point_cloud.hpp"

namespace supertoroid {

enum class CloudFormat { Xyz, PlyAscii };

/// Format implied by the file extension (.xyz/.txt or .ply).
CloudFormat format_from_path(const std::filesystem::path& path);

PointCloud read_xyz(std::istream& in);
PointCloud read_ply(std::istream& in);
void write_xyz(const PointCloud& cloud, std::ostream& out);
void write_ply(const PointCloud& cloud, std::ostream& out);

PointCloud read_cloud(const std::filesystem::path& path,
                      std::optional<CloudFormat> format = std::nullopt);
void write_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                 std::optional<CloudFormat> format = std::nullopt);

inline constexpr Rgb kCloudColor{0, 255, 0};
inline constexpr Rgb kModelColor{255, 0, 0};

/// PLY with the input cloud in green followed by n_eta x n_omega samples of
/// the fitted surface in red.
void export_fit_overlay(const Modeld& model, const PointCloud& cloud,
                        const std::filesystem::path& path, int n_eta = 64, int n_omega = 64);

}  // namespace supertoroid
