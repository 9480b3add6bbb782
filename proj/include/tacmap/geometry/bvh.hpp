#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "tacmap/geometry/mesh.hpp"
#include "tacmap/geometry/ray.hpp"

namespace tacmap {

struct BvhNode {
  Aabb box;
  // Leaf: triangles order[first, first + count). Inner: children at first, first + 1.
  std::uint32_t first = 0;
  std::uint32_t count = 0;

  bool leaf() const { return count > 0; }
};

// Binary BVH built by median split on the longest axis of the centroid
// bounds. Construction is deterministic; the structure is immutable.
class Bvh {
 public:
  static constexpr std::uint32_t kMaxLeafSize = 4;

  Bvh() = default;

  static Bvh build(const TriangleMesh& mesh) {
    Bvh bvh;
    const auto n = static_cast<std::uint32_t>(mesh.num_triangles());
    bvh.order_.resize(n);
    std::iota(bvh.order_.begin(), bvh.order_.end(), 0u);
    std::vector<Vec3> centroids(n);
    std::vector<Aabb> tri_boxes(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      for (int k = 0; k < 3; ++k) tri_boxes[i].extend(mesh.vertex(i, k));
      centroids[i] = (mesh.vertex(i, 0) + mesh.vertex(i, 1) + mesh.vertex(i, 2)) / 3.0;
    }
    bvh.nodes_.reserve(n == 0 ? 1 : 2 * n);
    bvh.nodes_.emplace_back();
    if (n == 0) return bvh;

    struct Task {
      std::uint32_t node, begin, end;
    };
    std::vector<Task> stack{{0, 0, n}};
    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      Aabb box, centroid_box;
      for (std::uint32_t i = task.begin; i < task.end; ++i) {
        box.extend(tri_boxes[bvh.order_[i]]);
        centroid_box.extend(centroids[bvh.order_[i]]);
      }
      bvh.nodes_[task.node].box = box;
      const std::uint32_t count = task.end - task.begin;
      if (count <= kMaxLeafSize) {
        bvh.nodes_[task.node].first = task.begin;
        bvh.nodes_[task.node].count = count;
        continue;
      }
      int axis = 0;
      centroid_box.extent().maxCoeff(&axis);
      const std::uint32_t mid = task.begin + count / 2;
      std::nth_element(bvh.order_.begin() + task.begin, bvh.order_.begin() + mid,
                       bvh.order_.begin() + task.end,
                       [&](std::uint32_t a, std::uint32_t b) {
                         const double ca = centroids[a][axis], cb = centroids[b][axis];
                         return ca < cb || (ca == cb && a < b);
                       });
      const auto left = static_cast<std::uint32_t>(bvh.nodes_.size());
      bvh.nodes_.emplace_back();
      bvh.nodes_.emplace_back();
      bvh.nodes_[task.node].first = left;
      bvh.nodes_[task.node].count = 0;
      stack.push_back({left + 1, mid, task.end});
      stack.push_back({left, task.begin, mid});
    }
    return bvh;
  }

  const std::vector<BvhNode>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& triangle_order() const { return order_; }
  bool empty() const { return order_.empty(); }

  // Closest hit in [ray.t_min, ray.t_max] among triangles passing `filter`.
  // Equal-t ties go to the lowest triangle id.
  std::optional<HitCandidate> closest(const TriangleMesh& mesh, const Ray& ray,
                                      FacingFilter filter) const {
    if (order_.empty()) return std::nullopt;
    const WatertightRay wray(ray);
    const Vec3 inv_dir = ray.direction.cwiseInverse();
    HitCandidate best;
    best.t = ray.t_max;

    std::array<std::uint32_t, 64> stack;
    std::size_t top = 0;
    double root_entry = 0.0;
    if (!slab(nodes_[0].box, ray, inv_dir, ray.t_min, best.t, root_entry)) return std::nullopt;
    stack[top++] = 0;
    while (top > 0) {
      const BvhNode& node = nodes_[stack[--top]];
      // Re-test against the shrunk interval; equal-t hits stay admissible.
      double entry = 0.0;
      if (!slab(node.box, ray, inv_dir, ray.t_min, best.t, entry)) continue;
      if (node.leaf()) {
        for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
          const std::uint32_t tri = order_[i];
          const Vec3& n = mesh.normals()[tri];
          if (!passes_filter(n, ray.direction, filter)) continue;
          auto hit = wray.intersect(mesh.vertex(tri, 0), mesh.vertex(tri, 1),
                                    mesh.vertex(tri, 2), n, tri, ray.t_min, best.t);
          if (hit && (!best.valid() || hit->better_than(best))) best = *hit;
        }
        continue;
      }
      double e0 = 0.0, e1 = 0.0;
      const bool h0 = slab(nodes_[node.first].box, ray, inv_dir, ray.t_min, best.t, e0);
      const bool h1 = slab(nodes_[node.first + 1].box, ray, inv_dir, ray.t_min, best.t, e1);
      TACMAP_CHECK(top + 2 <= stack.size(), "BVH traversal stack overflow");
      if (h0 && h1) {
        // Push the farther child first so the nearer one is visited next.
        if (e0 <= e1) {
          stack[top++] = node.first + 1;
          stack[top++] = node.first;
        } else {
          stack[top++] = node.first;
          stack[top++] = node.first + 1;
        }
      } else if (h0) {
        stack[top++] = node.first;
      } else if (h1) {
        stack[top++] = node.first + 1;
      }
    }
    if (!best.valid()) return std::nullopt;
    return best;
  }

 private:
  // Conservative slab test: t_far is inflated so round-off in the box test
  // never prunes a triangle the exact test would hit.
  static bool slab(const Aabb& box, const Ray& ray, const Vec3& inv_dir, double t_min,
                   double t_max, double& entry) {
    constexpr double kInflate = 1.0 + 4.0 * std::numeric_limits<double>::epsilon();
    double t0 = t_min, t1 = t_max;
    for (int a = 0; a < 3; ++a) {
      if (ray.direction[a] == 0.0) {
        if (ray.origin[a] < box.lo[a] || ray.origin[a] > box.hi[a]) return false;
        continue;
      }
      double near = (box.lo[a] - ray.origin[a]) * inv_dir[a];
      double far = (box.hi[a] - ray.origin[a]) * inv_dir[a];
      if (near > far) std::swap(near, far);
      far *= far > 0.0 ? kInflate : 1.0 / kInflate;
      near *= near > 0.0 ? 1.0 / kInflate : kInflate;
      t0 = std::max(t0, near);
      t1 = std::min(t1, far);
      if (t0 > t1) return false;
    }
    entry = t0;
    return true;
  }

  std::vector<BvhNode> nodes_;
  std::vector<std::uint32_t> order_;
};

inline Bvh build_bvh(const TriangleMesh& mesh) { return Bvh::build(mesh); }

inline std::optional<RayHit> raycast_first_hit(const Bvh& bvh, const TriangleMesh& mesh,
                                               const Ray& ray,
                                               FacingFilter filter = FacingFilter::any) {
  auto best = bvh.closest(mesh, ray, filter);
  if (!best) return std::nullopt;
  return finalize_hit(mesh, ray, *best);
}

}  // namespace tacmap
