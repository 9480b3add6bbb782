#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tacmap/error.hpp"
#include "tacmap/io/json_fields.hpp"
#include "tacmap/sensor/sensing_grid.hpp"

namespace tacmap {

inline nlohmann::json surface_to_json(const SensorSurfaceSpec& spec) {
  using nlohmann::json;
  json out{{"variant", variant_name(spec)}};
  if (const auto* s = std::get_if<FlatRect>(&spec)) {
    out["dims"] = {{"x_m", s->x_extent}, {"y_m", s->y_extent}};
  } else if (const auto* s = std::get_if<SphericalCap>(&spec)) {
    out["dims"] = {{"radius_m", s->radius}, {"half_angle_rad", s->half_angle}};
  } else if (const auto* s = std::get_if<CylindricalPatch>(&spec)) {
    out["dims"] = {{"radius_m", s->radius},
                   {"length_m", s->axial_length},
                   {"arc_half_angle_rad", s->arc_half_angle}};
  } else if (const auto* s = std::get_if<MeshSurface>(&spec)) {
    json dims{{"mesh", s->source}};
    if (s->chart) {
      dims["chart"] = {{"origin_m", json_fields::to_json(s->chart->origin)},
                       {"u_axis", json_fields::to_json(s->chart->u_axis)},
                       {"v_axis", json_fields::to_json(s->chart->v_axis)},
                       {"u_extent_m", s->chart->u_extent},
                       {"v_extent_m", s->chart->v_extent}};
    }
    out["dims"] = dims;
  }
  return out;
}

inline nlohmann::json grid_descriptor(const SensingGrid& grid, const std::string& blob_name) {
  return {{"spec", surface_to_json(grid.spec)},
          {"H", grid.rows()},
          {"W", grid.cols()},
          {"delta_m", grid.delta()},
          {"d_max_m", grid.d_max()},
          {"blob", blob_name},
          {"blob_layout", "f32 little-endian, row-major: points[H*W*3], normals[H*W*3], areas[H*W]"}};
}

// points (xyz), then inward normals (xyz), then pixel areas, all f32.
inline std::vector<float> grid_blob(const SensingGrid& grid) {
  std::vector<float> out;
  out.reserve(7 * grid.size());
  for (const auto& p : grid.points) {
    for (int c = 0; c < 3; ++c) out.push_back(static_cast<float>(p[c]));
  }
  for (const auto& n : grid.inward_normals) {
    for (int c = 0; c < 3; ++c) out.push_back(static_cast<float>(n[c]));
  }
  for (double a : grid.pixel_areas) out.push_back(static_cast<float>(a));
  return out;
}

struct GridExport {
  std::filesystem::path descriptor;
  std::filesystem::path blob;
};

inline GridExport export_grid(const SensingGrid& grid, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory '" + out_dir.string() + "'");
  }
  GridExport paths{out_dir / "grid.json", out_dir / "grid.bin"};
  const auto blob = grid_blob(grid);
  std::ofstream bin(paths.blob, std::ios::binary | std::ios::trunc);
  if (!bin) throw IoError("cannot write '" + paths.blob.string() + "'");
  bin.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob.size() * sizeof(float)));
  if (!bin) throw IoError("failed writing '" + paths.blob.string() + "'");
  std::ofstream desc(paths.descriptor, std::ios::trunc);
  if (!desc) throw IoError("cannot write '" + paths.descriptor.string() + "'");
  desc << grid_descriptor(grid, paths.blob.filename().string()).dump(2) << '\n';
  if (!desc) throw IoError("failed writing '" + paths.descriptor.string() + "'");
  return paths;
}

}  // namespace tacmap
