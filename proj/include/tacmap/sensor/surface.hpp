#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include "tacmap/error.hpp"
#include "tacmap/geometry/mesh.hpp"

namespace tacmap {

// Sensor rest surfaces. All variants share one frame convention: the
// sensor's outermost point sits at the origin, the outward normal there is
// +z, and the sensor body lies toward -z.

// Planar pad in the z = 0 plane.
struct FlatRect {
  double x_extent = 0.02;
  double y_extent = 0.02;
};

// Cap of a sphere centered at (0, 0, -radius); polar angle measured from +z.
struct SphericalCap {
  double radius = 0.01;
  double half_angle = std::numbers::pi / 3.0;
};

// Patch of a cylinder whose axis is parallel to y through (0, 0, -radius);
// arc angle measured from +z about the y axis.
struct CylindricalPatch {
  double radius = 0.01;
  double axial_length = 0.02;
  double arc_half_angle = std::numbers::pi / 4.0;
};

// Rectangular chart used to sample a mesh surface: cell centers on the
// chart rectangle are projected along -(u_axis x v_axis) onto the mesh.
struct RectChart {
  Vec3 origin = Vec3::Zero();  // corner of the rectangle
  Vec3 u_axis = Vec3::UnitY();
  Vec3 v_axis = Vec3::UnitX();
  double u_extent = 0.0;
  double v_extent = 0.0;
};

// Arbitrary fingertip mesh, outward-wound.
struct MeshSurface {
  std::shared_ptr<const TriangleMesh> mesh;
  std::optional<RectChart> chart;
  std::string source;  // informational, e.g. the mesh path
};

using SensorSurfaceSpec = std::variant<FlatRect, SphericalCap, CylindricalPatch, MeshSurface>;

inline const char* variant_name(const SensorSurfaceSpec& spec) {
  switch (spec.index()) {
    case 0: return "flat";
    case 1: return "spherical_cap";
    case 2: return "cylindrical_patch";
    default: return "mesh";
  }
}

namespace detail {
inline void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InputError(std::string(field) + " must be positive and finite");
  }
}
}  // namespace detail

inline void validate(const SensorSurfaceSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FlatRect>) {
          detail::require_positive(s.x_extent, "flat.x_extent");
          detail::require_positive(s.y_extent, "flat.y_extent");
        } else if constexpr (std::is_same_v<T, SphericalCap>) {
          detail::require_positive(s.radius, "spherical_cap.radius");
          detail::require_positive(s.half_angle, "spherical_cap.half_angle");
          if (s.half_angle > std::numbers::pi / 2.0) {
            throw InputError("spherical_cap.half_angle must be in (0, pi/2]");
          }
        } else if constexpr (std::is_same_v<T, CylindricalPatch>) {
          detail::require_positive(s.radius, "cylindrical_patch.radius");
          detail::require_positive(s.axial_length, "cylindrical_patch.axial_length");
          detail::require_positive(s.arc_half_angle, "cylindrical_patch.arc_half_angle");
          if (s.arc_half_angle > std::numbers::pi / 2.0) {
            throw InputError("cylindrical_patch.arc_half_angle must be in (0, pi/2]");
          }
        } else {
          if (!s.mesh) throw InputError("mesh surface has no mesh");
          if (!s.chart) {
            throw InputError("mesh surface requires a rectangular parameter chart");
          }
          detail::require_positive(s.chart->u_extent, "chart.u_extent");
          detail::require_positive(s.chart->v_extent, "chart.v_extent");
          const double nu = s.chart->u_axis.norm(), nv = s.chart->v_axis.norm();
          if (std::abs(nu - 1.0) > 1e-9 || std::abs(nv - 1.0) > 1e-9 ||
              std::abs(s.chart->u_axis.dot(s.chart->v_axis)) > 1e-9) {
            throw InputError("chart axes must be orthonormal");
          }
        }
      },
      spec);
}

// Area of the sensing surface offset `delta` outward from the rest surface.
// Empty for mesh surfaces.
inline std::optional<double> analytic_area(const SensorSurfaceSpec& spec, double delta) {
  if (const auto* flat = std::get_if<FlatRect>(&spec)) return flat->x_extent * flat->y_extent;
  if (const auto* cap = std::get_if<SphericalCap>(&spec)) {
    const double r = cap->radius + delta;
    return 2.0 * std::numbers::pi * r * r * (1.0 - std::cos(cap->half_angle));
  }
  if (const auto* cyl = std::get_if<CylindricalPatch>(&spec)) {
    return (cyl->radius + delta) * 2.0 * cyl->arc_half_angle * cyl->axial_length;
  }
  return std::nullopt;
}

}  // namespace tacmap
