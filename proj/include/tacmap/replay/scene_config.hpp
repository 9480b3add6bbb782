#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tacmap/contact/signals.hpp"
#include "tacmap/error.hpp"
#include "tacmap/geometry/mesh_io.hpp"
#include "tacmap/io/digest.hpp"
#include "tacmap/io/json_fields.hpp"
#include "tacmap/render/renderer.hpp"
#include "tacmap/sensor/sensing_grid.hpp"

// Scene configuration documents:
//
//   {
//     "sensor":  {"variant": "flat", "dims": {"x_m": 0.02, "y_m": 0.02},
//                 "H": 64, "W": 64, "delta_m": 0.0, "d_max_m": 0.002},
//     "objects": [{"name": "ball", "mesh": "ball.obj", "unit_scale": 0.001}],
//     "render":  {"facing": "back_only", "t_max_m": null, "combine": "max"},
//     "force":   {"k_n_per_m3": 1e6},
//     "tau_m":   5e-5
//   }
//
// Variants and their dims:
//   flat               x_m, y_m
//   spherical_cap      radius_m, half_angle_rad
//   cylindrical_patch  radius_m, length_m, arc_half_angle_rad
//   mesh               mesh, unit_scale, chart{origin_m, u_axis, v_axis, u_extent_m, v_extent_m}
//
// Mesh paths are relative to the config file. Unknown fields are rejected.
namespace tacmap {

struct ObjectEntry {
  std::string name;
  std::filesystem::path mesh;  // as written in the config
  double unit_scale = 1.0;
};

struct SceneConfig {
  SensorSurfaceSpec surface = FlatRect{};
  GridParams grid;
  std::vector<ObjectEntry> objects;
  RenderConfig render;
  ForceModel force;
  double tau = kDefaultContactThreshold;
};

// A loaded, ready-to-render scene. Immutable once prepared.
struct Scene {
  SceneConfig config;
  std::filesystem::path base_dir;
  SensingGrid grid;
  std::vector<std::shared_ptr<const Body>> bodies;  // same order as config.objects
  std::string config_hash;                          // SHA-256 over config text and mesh bytes

  const Body* find_body(const std::string& name) const {
    for (const auto& b : bodies) {
      if (b->name == name) return b.get();
    }
    return nullptr;
  }
  std::size_t body_index(const std::string& name) const {
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      if (bodies[i]->name == name) return i;
    }
    throw InputError("unknown object '" + name + "'");
  }
};

namespace detail {

namespace jf = json_fields;

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

inline SensorSurfaceSpec parse_surface(const jf::json& sensor, const std::filesystem::path& base) {
  const std::string variant = jf::string(sensor, "sensor", "variant");
  const jf::json& dims = jf::object(sensor, "sensor", "dims");
  const std::string path = "sensor.dims";
  if (variant == "flat") {
    jf::reject_unknown(dims, path, {"x_m", "y_m"});
    return FlatRect{jf::number(dims, path, "x_m"), jf::number(dims, path, "y_m")};
  }
  if (variant == "spherical_cap") {
    jf::reject_unknown(dims, path, {"radius_m", "half_angle_rad"});
    return SphericalCap{jf::number(dims, path, "radius_m"), jf::number(dims, path, "half_angle_rad")};
  }
  if (variant == "cylindrical_patch") {
    jf::reject_unknown(dims, path, {"radius_m", "length_m", "arc_half_angle_rad"});
    return CylindricalPatch{jf::number(dims, path, "radius_m"), jf::number(dims, path, "length_m"),
                            jf::number(dims, path, "arc_half_angle_rad")};
  }
  if (variant == "mesh") {
    jf::reject_unknown(dims, path, {"mesh", "unit_scale", "chart"});
    MeshSurface surface;
    const std::string mesh_path = jf::string(dims, path, "mesh");
    const double scale = jf::optional_number(dims, path, "unit_scale").value_or(1.0);
    auto loaded = load_mesh(resolve(base, mesh_path), scale);
    surface.mesh = std::make_shared<const TriangleMesh>(std::move(loaded.mesh));
    surface.source = mesh_path;
    if (dims.contains("chart")) {
      const jf::json& c = jf::object(dims, path, "chart");
      const std::string cp = path + ".chart";
      jf::reject_unknown(c, cp, {"origin_m", "u_axis", "v_axis", "u_extent_m", "v_extent_m"});
      surface.chart = RectChart{jf::vector<3>(c, cp, "origin_m"), jf::vector<3>(c, cp, "u_axis"),
                                jf::vector<3>(c, cp, "v_axis"), jf::number(c, cp, "u_extent_m"),
                                jf::number(c, cp, "v_extent_m")};
    }
    return surface;
  }
  throw InputError("field 'sensor.variant': unknown variant '" + variant +
                   "' (expected flat, spherical_cap, cylindrical_patch, or mesh)");
}

inline RenderConfig parse_render(const jf::json& doc) {
  RenderConfig cfg;
  if (!doc.contains("render")) return cfg;
  const jf::json& r = jf::object(doc, "", "render");
  jf::reject_unknown(r, "render", {"facing", "t_max_m", "combine"});
  if (r.contains("facing")) {
    const std::string facing = jf::string(r, "render", "facing");
    if (facing == "back_only") cfg.facing = FacingFilter::back_only;
    else if (facing == "any") cfg.facing = FacingFilter::any;
    else throw InputError("field 'render.facing' must be 'back_only' or 'any'");
  }
  cfg.t_max = jf::optional_number(r, "render", "t_max_m");
  if (cfg.t_max && !(*cfg.t_max > 0.0)) throw InputError("field 'render.t_max_m' must be > 0");
  if (r.contains("combine")) {
    const std::string combine = jf::string(r, "render", "combine");
    if (combine == "max") cfg.combine = CombineRule::max;
    else if (combine == "sum") cfg.combine = CombineRule::sum;
    else throw InputError("field 'render.combine' must be 'max' or 'sum'");
  }
  return cfg;
}

}  // namespace detail

// Parses a config document. Sensor meshes (variant "mesh") are loaded here;
// object meshes are loaded by prepare_scene.
inline SceneConfig parse_scene_config(const json_fields::json& doc,
                                      const std::filesystem::path& base_dir) {
  namespace jf = json_fields;
  if (!doc.is_object()) throw InputError("scene config must be a JSON object");
  jf::reject_unknown(doc, "", {"sensor", "objects", "render", "force", "tau_m"});
  SceneConfig cfg;
  const jf::json& sensor = jf::object(doc, "", "sensor");
  jf::reject_unknown(sensor, "sensor", {"variant", "dims", "H", "W", "delta_m", "d_max_m"});
  cfg.surface = detail::parse_surface(sensor, base_dir);
  cfg.grid.rows = jf::integer(sensor, "sensor", "H", 64);
  cfg.grid.cols = jf::integer(sensor, "sensor", "W", 64);
  cfg.grid.delta = jf::optional_number(sensor, "sensor", "delta_m").value_or(0.0);
  cfg.grid.d_max = jf::optional_number(sensor, "sensor", "d_max_m").value_or(0.002);

  if (doc.contains("objects")) {
    const jf::json& objects = doc.at("objects");
    if (!objects.is_array()) throw InputError("field 'objects' must be an array");
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const std::string path = "objects[" + std::to_string(i) + "]";
      const jf::json& o = objects[i];
      if (!o.is_object()) throw InputError("field '" + path + "' must be an object");
      jf::reject_unknown(o, path, {"name", "mesh", "unit_scale"});
      ObjectEntry entry;
      entry.name = jf::string(o, path, "name");
      entry.mesh = jf::string(o, path, "mesh");
      entry.unit_scale = jf::optional_number(o, path, "unit_scale").value_or(1.0);
      if (!(entry.unit_scale > 0.0)) throw InputError("field '" + path + ".unit_scale' must be > 0");
      for (const auto& other : cfg.objects) {
        if (other.name == entry.name) throw InputError("duplicate object name '" + entry.name + "'");
      }
      cfg.objects.push_back(std::move(entry));
    }
  }
  cfg.render = detail::parse_render(doc);
  if (doc.contains("force")) {
    const jf::json& f = jf::object(doc, "", "force");
    jf::reject_unknown(f, "force", {"k_n_per_m3"});
    cfg.force.stiffness = jf::number(f, "force", "k_n_per_m3");
    if (!(cfg.force.stiffness > 0.0)) throw InputError("field 'force.k_n_per_m3' must be > 0");
  }
  cfg.tau = jf::optional_number(doc, "", "tau_m").value_or(kDefaultContactThreshold);
  if (!(cfg.tau >= 0.0)) throw InputError("field 'tau_m' must be >= 0");
  return cfg;
}

// Loads object meshes, builds BVHs, and generates the sensing grid.
inline Scene prepare_scene(SceneConfig config, const std::filesystem::path& base_dir,
                           Sha256* digest = nullptr) {
  Scene scene;
  scene.base_dir = base_dir;
  for (const auto& entry : config.objects) {
    const auto mesh_path = detail::resolve(base_dir, entry.mesh.string());
    if (!std::filesystem::exists(mesh_path)) {
      throw InputError("object '" + entry.name + "': mesh file '" + mesh_path.string() +
                       "' not found");
    }
    auto loaded = load_mesh(mesh_path, entry.unit_scale);
    if (digest) digest->update(detail::read_file_bytes(mesh_path));
    scene.bodies.push_back(make_body(entry.name, std::move(loaded.mesh)));
  }
  scene.grid = generate_sensing_grid(config.surface, config.grid);
  config.render.resolved_t_max(scene.grid);
  scene.config = std::move(config);
  return scene;
}

inline Scene load_scene(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw InputError("scene config '" + path.string() + "' not found");
  }
  const std::string text = json_fields::read_text(path);
  const auto doc = json_fields::parse_text(text, path.string());
  const auto base = path.parent_path();
  SceneConfig cfg;
  try {
    cfg = parse_scene_config(doc, base);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  Sha256 digest;
  digest.update(doc.dump());
  Scene scene = prepare_scene(std::move(cfg), base, &digest);
  scene.config_hash = digest.hex();
  return scene;
}

}  // namespace tacmap
