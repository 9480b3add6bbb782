#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "tacmap/error.hpp"
#include "tacmap/geometry/pose.hpp"

namespace tacmap {

using Triangle = std::array<std::uint32_t, 3>;

inline constexpr double kMinTriangleArea = 1e-12;  // m^2

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& other) {
    lo = lo.cwiseMin(other.lo);
    hi = hi.cwiseMax(other.hi);
  }
  bool empty() const { return (lo.array() > hi.array()).any(); }
  Vec3 extent() const { return hi - lo; }
  Vec3 center() const { return 0.5 * (lo + hi); }
  bool contains(const Aabb& inner, double slack = 0.0) const {
    return (inner.lo.array() >= lo.array() - slack).all() &&
           (inner.hi.array() <= hi.array() + slack).all();
  }
};

// Validated triangle soup in meters. Construct through TriangleMesh::build.
class TriangleMesh {
 public:
  struct BuildResult;

  TriangleMesh() = default;

  // Checks indices and finiteness (throws InputError) and drops triangles
  // with area <= kMinTriangleArea. Throws if nothing survives.
  static BuildResult build(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_vertices() const { return vertices_.size(); }

  const Vec3& vertex(std::uint32_t tri, int corner) const { return vertices_[triangles_[tri][corner]]; }

  Aabb bounds() const {
    Aabb box;
    for (const auto& v : vertices_) box.extend(v);
    return box;
  }

  double triangle_area(std::size_t tri) const {
    const auto& t = triangles_[tri];
    return 0.5 * (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]).norm();
  }

  double surface_area() const {
    double area = 0.0;
    for (std::size_t i = 0; i < triangles_.size(); ++i) area += triangle_area(i);
    return area;
  }

  // Positive for a closed mesh with outward-facing winding.
  double signed_volume() const {
    double six_volume = 0.0;
    for (const auto& t : triangles_) {
      six_volume += vertices_[t[0]].dot(vertices_[t[1]].cross(vertices_[t[2]]));
    }
    return six_volume / 6.0;
  }

  // Area-weighted vertex normals following the triangle winding.
  std::vector<Vec3> vertex_normals() const {
    std::vector<Vec3> out(vertices_.size(), Vec3::Zero());
    for (const auto& t : triangles_) {
      const Vec3 n = (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]);
      for (auto idx : t) out[idx] += n;
    }
    for (auto& n : out) {
      const double len = n.norm();
      if (len > 0.0) n /= len;
    }
    return out;
  }

  // True when every edge shared by two triangles is traversed in opposite
  // directions by them, and no edge is shared by more than two.
  bool consistently_oriented() const {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
    for (const auto& t : triangles_) {
      for (int k = 0; k < 3; ++k) {
        if (++directed[{t[k], t[(k + 1) % 3]}] > 1) return false;
      }
    }
    return true;
  }

  bool closed() const {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
    for (const auto& t : triangles_) {
      for (int k = 0; k < 3; ++k) directed[{t[k], t[(k + 1) % 3]}]++;
    }
    for (const auto& [edge, count] : directed) {
      if (directed.find({edge.second, edge.first}) == directed.end()) return false;
    }
    return true;
  }

  TriangleMesh transformed(const RigidPose& pose) const {
    TriangleMesh out = *this;
    for (auto& v : out.vertices_) v = pose.apply_point(v);
    for (auto& n : out.normals_) n = pose.apply_vector(n);
    return out;
  }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Vec3> normals_;
};

struct TriangleMesh::BuildResult {
  TriangleMesh mesh;
  std::size_t dropped_degenerate = 0;
};

inline TriangleMesh::BuildResult TriangleMesh::build(std::vector<Vec3> vertices,
                                                     std::vector<Triangle> triangles) {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!vertices[i].allFinite()) {
      std::ostringstream msg;
      msg << "vertex " << i << " has a non-finite coordinate";
      throw InputError(msg.str());
    }
  }
  BuildResult result;
  TriangleMesh& mesh = result.mesh;
  mesh.triangles_.reserve(triangles.size());
  mesh.normals_.reserve(triangles.size());
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const Triangle& t = triangles[i];
    for (auto idx : t) {
      if (idx >= vertices.size()) {
        std::ostringstream msg;
        msg << "triangle " << i << " references vertex " << idx << " but the mesh has "
            << vertices.size() << " vertices";
        throw InputError(msg.str());
      }
    }
    const Vec3 cross = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
    const double area = 0.5 * cross.norm();
    if (!(area > kMinTriangleArea)) {
      ++result.dropped_degenerate;
      continue;
    }
    mesh.triangles_.push_back(t);
    mesh.normals_.push_back(cross / (2.0 * area));
  }
  if (mesh.triangles_.empty()) throw InputError("mesh has no valid (non-degenerate) triangles");
  mesh.vertices_ = std::move(vertices);
  return result;
}

}  // namespace tacmap
