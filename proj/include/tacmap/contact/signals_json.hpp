#pragma once

#include "tacmap/contact/signals.hpp"
#include "tacmap/io/json_fields.hpp"

namespace tacmap {

// One JSON record per frame, SI units.
inline nlohmann::json signals_to_json(const ContactSignals& s) {
  using nlohmann::json;
  json out;
  out["centroid_pixel"] = s.centroid_pixel
                              ? json::array({s.centroid_pixel->x(), s.centroid_pixel->y()})
                              : json(nullptr);
  out["centroid_point_m"] =
      s.centroid_point ? json_fields::to_json(*s.centroid_point) : json(nullptr);
  out["contact_area_m2"] = s.contact_area;
  out["max_depth_m"] = s.max_depth;
  out["mean_depth_m"] = s.mean_depth;
  out["active_pixels"] = s.active_pixels;
  out["net_force_n"] = json_fields::to_json(s.net_force);
  return out;
}

}  // namespace tacmap
