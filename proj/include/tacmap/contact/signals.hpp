#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "tacmap/error.hpp"
#include "tacmap/render/deform_map.hpp"
#include "tacmap/sensor/sensing_grid.hpp"

namespace tacmap {

inline constexpr double kDefaultContactThreshold = 5e-5;  // 0.05 mm
inline constexpr double kDefaultStiffness = 1e6;          // N/m^3

// Elastic-foundation force proxy: local pressure = stiffness * depth.
struct ForceModel {
  double stiffness = kDefaultStiffness;  // N/m^3

  void validate() const {
    if (!(stiffness > 0.0)) throw InputError("force stiffness k must be > 0");
  }
};

struct ContactSignals {
  std::optional<Eigen::Vector2d> centroid_pixel;  // (u, v)
  std::optional<Vec3> centroid_point;             // sensor frame, m
  double contact_area = 0.0;                      // m^2
  double max_depth = 0.0;                         // m
  double mean_depth = 0.0;                        // m, over active pixels
  std::size_t active_pixels = 0;
  Vec3 net_force = Vec3::Zero();                  // N, push on the object
};

using ContactMask = std::vector<bool>;

inline ContactMask contact_mask(const DeformMap& map, double threshold) {
  if (!(threshold >= 0.0)) throw InputError("contact threshold must be >= 0");
  ContactMask mask(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) mask[i] = map[i] > threshold;
  return mask;
}

inline ContactSignals compute_signals(const DeformMap& map, const SensingGrid& grid,
                                      double threshold = kDefaultContactThreshold,
                                      const ForceModel& force = {}) {
  if (map.rows() != grid.rows() || map.cols() != grid.cols()) {
    throw InputError("deform map shape " + std::to_string(map.rows()) + "x" +
                     std::to_string(map.cols()) + " does not match grid " +
                     std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()));
  }
  force.validate();
  const ContactMask mask = contact_mask(map, threshold);
  ContactSignals s;
  s.max_depth = map.max_depth();
  Eigen::Vector2d pixel_sum = Eigen::Vector2d::Zero();
  Vec3 point_sum = Vec3::Zero();
  double depth_sum = 0.0;
  for (int u = 0; u < map.rows(); ++u) {
    for (int v = 0; v < map.cols(); ++v) {
      const std::size_t i = map.index(u, v);
      if (!mask[i]) continue;
      const double area = grid.pixel_areas[i];
      ++s.active_pixels;
      pixel_sum += Eigen::Vector2d(u, v);
      point_sum += area * grid.points[i];
      s.contact_area += area;
      depth_sum += map[i];
      s.net_force -= force.stiffness * map[i] * area * grid.inward_normals[i];
    }
  }
  if (s.active_pixels > 0) {
    s.centroid_pixel = pixel_sum / static_cast<double>(s.active_pixels);
    s.centroid_point = point_sum / s.contact_area;
    s.mean_depth = depth_sum / static_cast<double>(s.active_pixels);
  }
  return s;
}

}  // namespace tacmap
