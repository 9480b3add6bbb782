#pragma once

#include <algorithm>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tacmap/error.hpp"
#include "tacmap/geometry/bvh.hpp"
#include "tacmap/geometry/mesh.hpp"
#include "tacmap/geometry/pose.hpp"
#include "tacmap/parallel.hpp"
#include "tacmap/render/deform_map.hpp"
#include "tacmap/sensor/sensing_grid.hpp"

namespace tacmap {

// A rigid object: geometry in its local frame plus its acceleration
// structure. Shared read-only between scenes.
struct Body {
  std::string name;
  TriangleMesh mesh;
  Bvh bvh;
};

inline std::shared_ptr<const Body> make_body(std::string name, TriangleMesh mesh) {
  auto body = std::make_shared<Body>();
  body->name = std::move(name);
  body->bvh = Bvh::build(mesh);
  body->mesh = std::move(mesh);
  return body;
}

struct SceneObject {
  std::shared_ptr<const Body> body;
  RigidPose pose;  // local -> world
};

struct SceneState {
  RigidPose sensor_pose;  // sensor -> world
  std::vector<SceneObject> objects;
};

enum class CombineRule { max, sum };

struct RenderConfig {
  FacingFilter facing = FacingFilter::back_only;
  std::optional<double> t_max;  // default: delta + d_max + 1 mm
  CombineRule combine = CombineRule::max;

  double resolved_t_max(const SensingGrid& grid) const {
    const double t = t_max.value_or(grid.delta() + grid.d_max() + 1e-3);
    if (!(t > 0.0)) throw InputError("render t_max must be > 0");
    return t;
  }
};

namespace detail {

struct PreparedObject {
  const Body* body;
  RigidPose sensor_to_local;
};

inline std::vector<PreparedObject> prepare(const SceneState& scene) {
  std::vector<PreparedObject> out;
  out.reserve(scene.objects.size());
  for (const auto& obj : scene.objects) {
    if (!obj.body) throw InputError("scene object has no body");
    out.push_back({obj.body.get(), obj.pose.inverse() * scene.sensor_pose});
  }
  return out;
}

// Depth of one object along one probe, before combination. The probe is in
// the object's local frame.
inline double probe_depth(const Body& body, const Vec3& origin, const Vec3& direction,
                          double t_max, double delta, double d_max, FacingFilter facing) {
  Ray ray;
  ray.origin = origin;
  ray.direction = direction;
  ray.t_max = t_max;
  ray.t_min = -kHitTolerance;
  double t_front = 0.0;
  if (auto hit = body.bvh.closest(body.mesh, ray, facing)) {
    t_front = std::max(hit->t, 0.0);
  } else {
    if (facing != FacingFilter::back_only) return 0.0;
    // No exit within [0, t_max]. The object still occupies the probe if the
    // point at t_max is inside it, i.e. the next surface beyond is an exit.
    ray.t_min = t_max;
    ray.t_max = std::numeric_limits<double>::infinity();
    auto beyond = body.bvh.closest(body.mesh, ray, FacingFilter::any);
    if (!beyond || facing_of(body.mesh.normals()[beyond->triangle], direction) != Facing::back) {
      return 0.0;
    }
    t_front = beyond->t;
  }
  return std::clamp(t_front - delta, 0.0, d_max);
}

inline void render_row(const SensingGrid& grid, std::span<const PreparedObject> objects,
                       const RenderConfig& cfg, double t_max, int row, DeformMap& out) {
  const double delta = grid.delta(), d_max = grid.d_max();
  for (int col = 0; col < grid.cols(); ++col) {
    const std::size_t i = grid.index(row, col);
    double depth = 0.0;
    for (const auto& obj : objects) {
      const Vec3 origin = obj.sensor_to_local.apply_point(grid.points[i]);
      const Vec3 direction = obj.sensor_to_local.apply_vector(grid.inward_normals[i]);
      const double d = probe_depth(*obj.body, origin, direction, t_max, delta, d_max, cfg.facing);
      depth = cfg.combine == CombineRule::max ? std::max(depth, d) : depth + d;
    }
    out[i] = std::min(depth, d_max);
  }
}

}  // namespace detail

// Per-pixel normal-aligned ray casting: depth = clamp(t_o - delta, 0, d_max)
// where t_o is the object's sensor-facing front along the pixel's inward
// ray. Objects combine per cfg.combine.
inline DeformMap render_deform_map(const SensingGrid& grid, const SceneState& scene,
                                   const RenderConfig& cfg = {}) {
  DeformMap out(grid.rows(), grid.cols(), grid.d_max());
  if (scene.objects.empty()) return out;
  const auto objects = detail::prepare(scene);
  const double t_max = cfg.resolved_t_max(grid);
  parallel_for_each_index(static_cast<std::size_t>(grid.rows()), [&](std::size_t row) {
    detail::render_row(grid, objects, cfg, t_max, static_cast<int>(row), out);
  });
  return out;
}

// Renders independent environments sharing one grid. Element i equals
// render_deform_map(grid, scenes[i], cfg) bit for bit.
inline std::vector<DeformMap> render_batch(const SensingGrid& grid, std::span<const SceneState> scenes,
                                           const RenderConfig& cfg = {}) {
  const double t_max = cfg.resolved_t_max(grid);
  std::vector<std::vector<detail::PreparedObject>> prepared;
  prepared.reserve(scenes.size());
  for (const auto& s : scenes) prepared.push_back(detail::prepare(s));
  std::vector<DeformMap> out(scenes.size(), DeformMap(grid.rows(), grid.cols(), grid.d_max()));
  const auto rows = static_cast<std::size_t>(grid.rows());
  parallel_for_each_index(scenes.size() * rows, [&](std::size_t task) {
    const std::size_t env = task / rows;
    if (prepared[env].empty()) return;
    detail::render_row(grid, prepared[env], cfg, t_max, static_cast<int>(task % rows), out[env]);
  });
  return out;
}

}  // namespace tacmap
