#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "tacmap/geometry/mesh.hpp"

// Closed, outward-wound indenter meshes. Useful for tests, demos, and the
// benchmark scene.
namespace tacmap::primitives {

// Subdivided icosahedron with every vertex projected onto the sphere.
// subdivisions = 4 gives 5120 triangles.
inline TriangleMesh icosphere(double radius, int subdivisions, const Vec3& center = Vec3::Zero()) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                         {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                         {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<Triangle> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const auto idx = static_cast<std::uint32_t>(v.size() - 1);
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Triangle> next;
    next.reserve(4 * f.size());
    for (const auto& t : f) {
      const auto ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (auto& p : v) p = center + radius * p;
  return TriangleMesh::build(std::move(v), std::move(f)).mesh;
}

// Axis-aligned box, 12 triangles.
inline TriangleMesh box(const Vec3& half_extents, const Vec3& center = Vec3::Zero()) {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) {
    v.emplace_back(center.x() + ((i & 1) ? half_extents.x() : -half_extents.x()),
                   center.y() + ((i & 2) ? half_extents.y() : -half_extents.y()),
                   center.z() + ((i & 4) ? half_extents.z() : -half_extents.z()));
  }
  std::vector<Triangle> f = {{0, 2, 3}, {0, 3, 1},   // -z
                             {4, 5, 7}, {4, 7, 6},   // +z
                             {0, 1, 5}, {0, 5, 4},   // -y
                             {2, 6, 7}, {2, 7, 3},   // +y
                             {0, 4, 6}, {0, 6, 2},   // -x
                             {1, 3, 7}, {1, 7, 5}};  // +x
  return TriangleMesh::build(std::move(v), std::move(f)).mesh;
}

// Capped cylinder along +z, base at z = 0 (centered on `base_center`).
inline TriangleMesh cylinder(double radius, double height, int segments,
                             const Vec3& base_center = Vec3::Zero()) {
  std::vector<Vec3> v;
  std::vector<Triangle> f;
  const auto n = static_cast<std::uint32_t>(segments);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    v.push_back(base_center + Vec3(radius * std::cos(a), radius * std::sin(a), 0.0));
    v.push_back(base_center + Vec3(radius * std::cos(a), radius * std::sin(a), height));
  }
  const auto bottom = static_cast<std::uint32_t>(v.size());
  v.push_back(base_center);
  const auto top = static_cast<std::uint32_t>(v.size());
  v.push_back(base_center + Vec3(0, 0, height));
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = (i + 1) % n;
    const std::uint32_t b0 = 2 * i, t0 = 2 * i + 1, b1 = 2 * j, t1 = 2 * j + 1;
    f.push_back({b0, b1, t1});
    f.push_back({b0, t1, t0});
    f.push_back({bottom, b1, b0});
    f.push_back({top, t0, t1});
  }
  return TriangleMesh::build(std::move(v), std::move(f)).mesh;
}

}  // namespace tacmap::primitives
