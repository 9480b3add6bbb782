#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tacmap/error.hpp"
#include "tacmap/geometry/mesh.hpp"

namespace tacmap {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

struct LoadedMesh {
  TriangleMesh mesh;
  std::size_t dropped_degenerate = 0;
};

namespace detail {

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mesh file '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::string lowercase_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// Resolves one OBJ face token ("7", "7/2", "7//3", "-1") to a zero-based index.
inline std::uint32_t parse_obj_index(std::string_view token, std::size_t vertex_count,
                                     std::size_t line_no) {
  const auto slash = token.find('/');
  const std::string head(token.substr(0, slash));
  long long value = 0;
  try {
    std::size_t used = 0;
    value = std::stoll(head, &used);
    if (used != head.size()) throw std::invalid_argument(head);
  } catch (const std::exception&) {
    throw InputError("OBJ line " + std::to_string(line_no) + ": bad face index '" +
                     std::string(token) + "'");
  }
  long long resolved = value > 0 ? value - 1 : static_cast<long long>(vertex_count) + value;
  if (value == 0 || resolved < 0 || resolved >= static_cast<long long>(vertex_count)) {
    throw InputError("OBJ line " + std::to_string(line_no) + ": face index " + head +
                     " out of range");
  }
  return static_cast<std::uint32_t>(resolved);
}

inline LoadedMesh parse_obj(const std::string& text, double unit_scale) {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(fields >> v.x() >> v.y() >> v.z())) {
        throw InputError("OBJ line " + std::to_string(line_no) + ": vertex needs 3 coordinates");
      }
      vertices.push_back(v * unit_scale);
    } else if (tag == "f") {
      std::vector<std::uint32_t> poly;
      std::string token;
      while (fields >> token) poly.push_back(parse_obj_index(token, vertices.size(), line_no));
      if (poly.size() < 3) {
        throw InputError("OBJ line " + std::to_string(line_no) + ": face needs >= 3 vertices");
      }
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        triangles.push_back({poly[0], poly[k], poly[k + 1]});
      }
    }
  }
  auto built = TriangleMesh::build(std::move(vertices), std::move(triangles));
  return {std::move(built.mesh), built.dropped_degenerate};
}

inline LoadedMesh parse_binary_stl(const std::string& bytes, double unit_scale) {
  constexpr std::size_t kHeader = 80;
  constexpr std::size_t kFacet = 50;
  if (bytes.size() < kHeader + 4) throw InputError("STL file is shorter than its header");
  std::uint32_t count = 0;
  std::memcpy(&count, bytes.data() + kHeader, 4);
  if (bytes.size() != kHeader + 4 + static_cast<std::size_t>(count) * kFacet) {
    if (bytes.compare(0, 5, "solid") == 0) {
      throw InputError("ASCII STL is not supported; convert to binary STL or OBJ");
    }
    throw InputError("STL size does not match its facet count " + std::to_string(count));
  }
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  vertices.reserve(3 * static_cast<std::size_t>(count));
  triangles.reserve(count);
  const char* cursor = bytes.data() + kHeader + 4;
  for (std::uint32_t f = 0; f < count; ++f, cursor += kFacet) {
    float coords[12];
    std::memcpy(coords, cursor, sizeof(coords));
    const auto base = static_cast<std::uint32_t>(vertices.size());
    for (int k = 0; k < 3; ++k) {
      vertices.emplace_back(coords[3 + 3 * k] * unit_scale, coords[4 + 3 * k] * unit_scale,
                            coords[5 + 3 * k] * unit_scale);
    }
    triangles.push_back({base, base + 1, base + 2});
  }
  auto built = TriangleMesh::build(std::move(vertices), std::move(triangles));
  return {std::move(built.mesh), built.dropped_degenerate};
}

}  // namespace detail

// Loads ASCII OBJ or binary STL, scaling coordinates by `unit_scale`
// (meters per model unit).
inline LoadedMesh load_mesh(const std::filesystem::path& path, double unit_scale = 1.0) {
  if (!(unit_scale > 0.0) || !std::isfinite(unit_scale)) {
    throw InputError("unit_scale must be positive and finite");
  }
  if (!std::filesystem::exists(path)) throw IoError("mesh file '" + path.string() + "' not found");
  const std::string bytes = detail::read_file_bytes(path);
  const std::string ext = detail::lowercase_extension(path);
  try {
    if (ext == ".obj") return detail::parse_obj(bytes, unit_scale);
    if (ext == ".stl") return detail::parse_binary_stl(bytes, unit_scale);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  throw InputError("unrecognized mesh format '" + ext + "' for " + path.string());
}

inline void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path,
                      double unit_scale = 1.0) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.precision(17);
  for (const auto& v : mesh.vertices()) {
    out << "v " << v.x() / unit_scale << ' ' << v.y() / unit_scale << ' ' << v.z() / unit_scale
        << '\n';
  }
  for (const auto& t : mesh.triangles()) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline void write_binary_stl(const TriangleMesh& mesh, const std::filesystem::path& path,
                             double unit_scale = 1.0) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  char header[80] = {};
  std::strncpy(header, "tacmap binary stl", sizeof(header) - 1);
  out.write(header, sizeof(header));
  const auto count = static_cast<std::uint32_t>(mesh.num_triangles());
  out.write(reinterpret_cast<const char*>(&count), 4);
  for (std::uint32_t i = 0; i < count; ++i) {
    float record[12];
    const Vec3& n = mesh.normals()[i];
    for (int c = 0; c < 3; ++c) record[c] = static_cast<float>(n[c]);
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = mesh.vertex(i, k);
      for (int c = 0; c < 3; ++c) record[3 + 3 * k + c] = static_cast<float>(v[c] / unit_scale);
    }
    out.write(reinterpret_cast<const char*>(record), sizeof(record));
    const std::uint16_t attributes = 0;
    out.write(reinterpret_cast<const char*>(&attributes), 2);
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace tacmap
