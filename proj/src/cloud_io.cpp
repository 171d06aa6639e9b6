#include "supertoroid/cloud_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "supertoroid/synthcloud.hpp"

namespace supertoroid {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    const std::size_t start = k;
    while (k < line.size() && !std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    if (k > start) out.push_back(line.substr(start, k - start));
  }
  return out;
}

double parse_number(std::string_view tok, std::size_t line) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "not a number: '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) throw ParseError(line, "non-finite value '" + std::string(tok) + "'");
  return v;
}

std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_vec(std::ostream& out, const Vec3d& v) {
  out << format_g9(v.x()) << ' ' << format_g9(v.y()) << ' ' << format_g9(v.z());
}

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<std::string> properties;
  bool has_list = false;
};

}  // namespace

CloudFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".ply") return CloudFormat::PlyAscii;
  if (ext == ".xyz" || ext == ".txt" || ext == ".pts") return CloudFormat::Xyz;
  throw Error(ErrorCode::UnsupportedFormat, "unknown cloud extension '" + ext + "'");
}

PointCloud read_xyz(std::istream& in) {
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  int columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto tok = split_ws(view);
    if (tok.empty()) continue;
    const int n = static_cast<int>(tok.size());
    if (n != 3 && n != 6) throw ParseError(line_no, "expected 3 or 6 columns");
    if (columns == 0) {
      columns = n;
      if (n == 6) cloud.normals.emplace();
    } else if (n != columns) {
      throw ParseError(line_no, "column count changed");
    }
    cloud.points.emplace_back(parse_number(tok[0], line_no), parse_number(tok[1], line_no),
                              parse_number(tok[2], line_no));
    if (n == 6) {
      cloud.normals->emplace_back(parse_number(tok[3], line_no), parse_number(tok[4], line_no),
                                  parse_number(tok[5], line_no));
    }
  }
  return cloud;
}

PointCloud read_ply(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line != "ply") throw ParseError(1, "missing 'ply' magic");
  std::vector<PlyElement> elements;
  bool ascii = false;
  for (;;) {
    if (!next_line()) throw ParseError(line_no, "unterminated header");
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) throw ParseError(line_no, "bad format line");
      if (tok[1] != "ascii") throw Error(ErrorCode::UnsupportedFormat, "only ASCII PLY is supported");
      ascii = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw ParseError(line_no, "bad element line");
      PlyElement e;
      e.name = std::string(tok[1]);
      e.count = static_cast<std::size_t>(parse_number(tok[2], line_no));
      elements.push_back(e);
    } else if (tok[0] == "property") {
      if (elements.empty() || tok.size() < 3) throw ParseError(line_no, "property outside element");
      if (tok[1] == "list") elements.back().has_list = true;
      elements.back().properties.emplace_back(tok.back());
    } else {
      throw ParseError(line_no, "unknown header keyword '" + std::string(tok[0]) + "'");
    }
  }
  if (!ascii) throw ParseError(line_no, "missing format line");

  PointCloud cloud;
  for (const auto& e : elements) {
    if (e.name != "vertex") {
      for (std::size_t k = 0; k < e.count; ++k) {
        if (!next_line()) throw ParseError(line_no, "truncated '" + e.name + "' element");
      }
      continue;
    }
    if (e.has_list) throw Error(ErrorCode::UnsupportedFormat, "list property on vertex element");
    auto index_of = [&](std::string_view name) -> int {
      const auto it = std::find(e.properties.begin(), e.properties.end(), name);
      return it == e.properties.end() ? -1 : static_cast<int>(it - e.properties.begin());
    };
    const int ix = index_of("x"), iy = index_of("y"), iz = index_of("z");
    if (ix < 0 || iy < 0 || iz < 0) throw ParseError(line_no, "vertex element lacks x, y, z");
    const int inx = index_of("nx"), iny = index_of("ny"), inz = index_of("nz");
    const int ir = index_of("red"), ig = index_of("green"), ib = index_of("blue");
    const bool normals = inx >= 0 && iny >= 0 && inz >= 0;
    const bool colors = ir >= 0 && ig >= 0 && ib >= 0;
    if (normals) cloud.normals.emplace();
    if (colors) cloud.colors.emplace();
    cloud.points.reserve(e.count);

    for (std::size_t k = 0; k < e.count; ++k) {
      if (!next_line()) throw ParseError(line_no + 1, "truncated vertex data");
      const auto tok = split_ws(line);
      if (tok.size() != e.properties.size()) throw ParseError(line_no, "wrong vertex field count");
      auto num = [&](int idx) { return parse_number(tok[static_cast<std::size_t>(idx)], line_no); };
      cloud.points.emplace_back(num(ix), num(iy), num(iz));
      if (normals) cloud.normals->emplace_back(num(inx), num(iny), num(inz));
      if (colors) {
        auto channel = [&](int idx) {
          return static_cast<std::uint8_t>(std::clamp(num(idx), 0.0, 255.0));
        };
        cloud.colors->push_back({channel(ir), channel(ig), channel(ib)});
      }
    }
  }
  return cloud;
}

void write_xyz(const PointCloud& cloud, std::ostream& out) {
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    write_vec(out, cloud.points[k]);
    if (cloud.normals) {
      out << ' ';
      write_vec(out, (*cloud.normals)[k]);
    }
    out << '\n';
  }
}

void write_ply(const PointCloud& cloud, std::ostream& out) {
  out << "ply\nformat ascii 1.0\ncomment supertoroid\n";
  out << "element vertex " << cloud.size() << '\n';
  out << "property float x\nproperty float y\nproperty float z\n";
  if (cloud.normals) out << "property float nx\nproperty float ny\nproperty float nz\n";
  if (cloud.colors) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    write_vec(out, cloud.points[k]);
    if (cloud.normals) {
      out << ' ';
      write_vec(out, (*cloud.normals)[k]);
    }
    if (cloud.colors) {
      const auto& c = (*cloud.colors)[k];
      out << ' ' << int(c[0]) << ' ' << int(c[1]) << ' ' << int(c[2]);
    }
    out << '\n';
  }
}

PointCloud read_cloud(const std::filesystem::path& path, std::optional<CloudFormat> format) {
  const CloudFormat f = format ? *format : format_from_path(path);
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return f == CloudFormat::PlyAscii ? read_ply(in) : read_xyz(in);
}

void write_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                 std::optional<CloudFormat> format) {
  const CloudFormat f = format ? *format : format_from_path(path);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  if (f == CloudFormat::PlyAscii) {
    write_ply(cloud, out);
  } else {
    write_xyz(cloud, out);
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

void export_fit_overlay(const Modeld& model, const PointCloud& cloud,
                        const std::filesystem::path& path, int n_eta, int n_omega) {
  const PointCloud surface = sample_surface(model, n_eta, n_omega);
  PointCloud overlay;
  overlay.points = cloud.points;
  overlay.points.insert(overlay.points.end(), surface.points.begin(), surface.points.end());
  overlay.colors.emplace(cloud.size(), kCloudColor);
  overlay.colors->insert(overlay.colors->end(), surface.size(), kModelColor);
  write_cloud(overlay, path, CloudFormat::PlyAscii);
}

}  // namespace supertoroid
