#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "tacmap/error.hpp"
#include "tacmap/geometry/bvh.hpp"
#include "tacmap/geometry/pose.hpp"
#include "tacmap/sensor/surface.hpp"

namespace tacmap {

struct GridParams {
  int rows = 64;            // H
  int cols = 64;            // W
  double delta = 0.0;       // standoff of the sensing surface outside the rest surface (m)
  double d_max = 0.002;     // deepest measurable indentation (m)
};

// Sensing points, inward unit normals, and pixel areas, row-major with
// pixel (u, v) at index u * cols + v. Points are in the sensor frame.
struct SensingGrid {
  SensorSurfaceSpec spec;
  GridParams params;
  std::vector<Vec3> points;
  std::vector<Vec3> inward_normals;
  std::vector<double> pixel_areas;

  int rows() const { return params.rows; }
  int cols() const { return params.cols; }
  std::size_t size() const { return points.size(); }
  double d_max() const { return params.d_max; }
  double delta() const { return params.delta; }
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(params.cols) +
           static_cast<std::size_t>(v);
  }
  double total_area() const {
    double sum = 0.0;
    for (double a : pixel_areas) sum += a;
    return sum;
  }
};

namespace detail {

inline void validate_params(const GridParams& p) {
  if (p.rows < 1 || p.cols < 1) throw InputError("grid H and W must be >= 1");
  if (!(p.delta >= 0.0) || !std::isfinite(p.delta)) throw InputError("delta must be >= 0");
  if (!(p.d_max > 0.0) || !std::isfinite(p.d_max)) throw InputError("d_max must be > 0");
}

inline void fill_flat(const FlatRect& s, SensingGrid& g) {
  const auto& p = g.params;
  const double dy = s.y_extent / p.rows, dx = s.x_extent / p.cols;
  for (int u = 0; u < p.rows; ++u) {
    for (int v = 0; v < p.cols; ++v) {
      const std::size_t i = g.index(u, v);
      g.points[i] = Vec3(-0.5 * s.x_extent + (v + 0.5) * dx, -0.5 * s.y_extent + (u + 0.5) * dy,
                         p.delta);
      g.inward_normals[i] = -Vec3::UnitZ();
      g.pixel_areas[i] = dx * dy;
    }
  }
}

// Rows sweep the polar angle from the apex outward, columns the azimuth.
inline void fill_spherical_cap(const SphericalCap& s, SensingGrid& g) {
  const auto& p = g.params;
  const Vec3 center(0.0, 0.0, -s.radius);
  const double r = s.radius + p.delta;
  const double d_polar = s.half_angle / p.rows;
  const double d_azimuth = 2.0 * std::numbers::pi / p.cols;
  for (int u = 0; u < p.rows; ++u) {
    const double polar = (u + 0.5) * d_polar;
    const double band = std::cos(u * d_polar) - std::cos((u + 1) * d_polar);
    for (int v = 0; v < p.cols; ++v) {
      const double azimuth = (v + 0.5) * d_azimuth;
      const Vec3 outward(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
                         std::cos(polar));
      const std::size_t i = g.index(u, v);
      g.points[i] = center + r * outward;
      g.inward_normals[i] = -outward;
      g.pixel_areas[i] = r * r * band * d_azimuth;
    }
  }
}

// Rows sweep the axial coordinate, columns the arc angle.
inline void fill_cylindrical_patch(const CylindricalPatch& s, SensingGrid& g) {
  const auto& p = g.params;
  const Vec3 axis_point(0.0, 0.0, -s.radius);
  const double r = s.radius + p.delta;
  const double dy = s.axial_length / p.rows;
  const double d_arc = 2.0 * s.arc_half_angle / p.cols;
  for (int u = 0; u < p.rows; ++u) {
    const double y = -0.5 * s.axial_length + (u + 0.5) * dy;
    for (int v = 0; v < p.cols; ++v) {
      const double arc = -s.arc_half_angle + (v + 0.5) * d_arc;
      const Vec3 outward(std::sin(arc), 0.0, std::cos(arc));
      const std::size_t i = g.index(u, v);
      g.points[i] = axis_point + r * outward + Vec3(0.0, y, 0.0);
      g.inward_normals[i] = -outward;
      g.pixel_areas[i] = r * d_arc * dy;
    }
  }
}

inline void fill_mesh_surface(const MeshSurface& s, SensingGrid& g) {
  const TriangleMesh& mesh = *s.mesh;
  if (!mesh.consistently_oriented()) {
    throw InputError("mesh surface '" + s.source + "' is not consistently oriented");
  }
  if (mesh.closed() && !(mesh.signed_volume() > 0.0)) {
    throw InputError("mesh surface '" + s.source + "' is closed but wound inward");
  }
  const RectChart& chart = *s.chart;
  const Vec3 chart_normal = chart.u_axis.cross(chart.v_axis);
  const Bvh bvh = Bvh::build(mesh);
  const std::vector<Vec3> vertex_normals = mesh.vertex_normals();
  const auto& p = g.params;
  const double du = chart.u_extent / p.rows, dv = chart.v_extent / p.cols;
  for (int u = 0; u < p.rows; ++u) {
    for (int v = 0; v < p.cols; ++v) {
      Ray ray;
      ray.origin = chart.origin + (u + 0.5) * du * chart.u_axis + (v + 0.5) * dv * chart.v_axis;
      ray.direction = -chart_normal;
      ray.t_min = -std::numeric_limits<double>::infinity();
      auto hit = bvh.closest(mesh, ray, FacingFilter::any);
      if (!hit) {
        std::ostringstream msg;
        msg << "chart cell (" << u << ", " << v << ") does not project onto mesh surface '"
            << s.source << "'";
        throw InputError(msg.str());
      }
      const Vec3& face_normal = mesh.normals()[hit->triangle];
      if (facing_of(face_normal, ray.direction) != Facing::front) {
        throw InputError("mesh surface '" + s.source +
                         "' faces away from its chart (outward orientation required)");
      }
      const auto& tri = mesh.triangles()[hit->triangle];
      const Vec3 outward = (hit->b0 * vertex_normals[tri[0]] + hit->b1 * vertex_normals[tri[1]] +
                            hit->b2 * vertex_normals[tri[2]])
                               .normalized();
      const Vec3 surface_point = ray.origin + hit->t * ray.direction;
      const std::size_t i = g.index(u, v);
      g.points[i] = surface_point + p.delta * outward;
      g.inward_normals[i] = -outward;
      g.pixel_areas[i] = du * dv / std::abs(face_normal.dot(chart_normal));
    }
  }
}

}  // namespace detail

inline SensingGrid generate_sensing_grid(const SensorSurfaceSpec& spec, const GridParams& params) {
  validate(spec);
  detail::validate_params(params);
  SensingGrid g;
  g.spec = spec;
  g.params = params;
  const auto n = static_cast<std::size_t>(params.rows) * static_cast<std::size_t>(params.cols);
  g.points.resize(n);
  g.inward_normals.resize(n);
  g.pixel_areas.resize(n);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FlatRect>) detail::fill_flat(s, g);
        else if constexpr (std::is_same_v<T, SphericalCap>) detail::fill_spherical_cap(s, g);
        else if constexpr (std::is_same_v<T, CylindricalPatch>) detail::fill_cylindrical_patch(s, g);
        else detail::fill_mesh_surface(s, g);
      },
      spec);
  return g;
}

struct WorldGrid {
  std::vector<Vec3> points;
  std::vector<Vec3> inward_normals;
};

inline WorldGrid grid_world_points(const SensingGrid& grid, const RigidPose& sensor_pose) {
  WorldGrid out;
  out.points.reserve(grid.size());
  out.inward_normals.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.points.push_back(sensor_pose.apply_point(grid.points[i]));
    out.inward_normals.push_back(sensor_pose.apply_vector(grid.inward_normals[i]));
  }
  return out;
}

}  // namespace tacmap
