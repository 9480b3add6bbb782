#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tacmap/error.hpp"
#include "tacmap/io/json_fields.hpp"
#include "tacmap/replay/scene_config.hpp"

namespace tacmap {

struct TrajectoryFrame {
  double ts = 0.0;  // seconds
  RigidPose sensor_pose;
  std::map<std::string, RigidPose> object_poses;
};

// Timestamped poses, rendered exactly as recorded (no interpolation).
struct Trajectory {
  std::vector<TrajectoryFrame> frames;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
};

// Checks strictly increasing timestamps and that every named object exists
// in the scene.
inline void validate(const Trajectory& traj, const Scene& scene) {
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    const auto& f = traj.frames[i];
    if (!std::isfinite(f.ts)) throw InputError("frame " + std::to_string(i) + ": ts is not finite");
    if (i > 0 && !(f.ts > traj.frames[i - 1].ts)) {
      throw InputError("frame " + std::to_string(i) + ": timestamps must be strictly increasing");
    }
    for (const auto& [name, pose] : f.object_poses) {
      if (scene.find_body(name) == nullptr) {
        throw InputError("frame " + std::to_string(i) + ": unknown object '" + name + "'");
      }
    }
  }
}

// Objects missing from a frame are absent from that frame's scene.
inline SceneState scene_state_for(const Scene& scene, const TrajectoryFrame& frame) {
  SceneState state;
  state.sensor_pose = frame.sensor_pose;
  for (const auto& body : scene.bodies) {
    auto it = frame.object_poses.find(body->name);
    if (it != frame.object_poses.end()) state.objects.push_back({body, it->second});
  }
  return state;
}

// JSON lines: {"ts": s, "sensor_pose": {"q": [w,x,y,z], "t": [m]}, "objects": {name: pose}}
inline Trajectory read_trajectory(std::istream& in, const std::string& label = "trajectory") {
  namespace jf = json_fields;
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = label + ":" + std::to_string(line_no);
    jf::json rec;
    try {
      rec = jf::json::parse(line);
    } catch (const jf::json::parse_error&) {
      throw InputError(where + ": invalid JSON");
    }
    try {
      if (!rec.is_object()) throw InputError("record must be an object");
      jf::reject_unknown(rec, "", {"ts", "sensor_pose", "objects"});
      TrajectoryFrame frame;
      frame.ts = jf::number(rec, "", "ts");
      if (rec.contains("sensor_pose")) frame.sensor_pose = jf::pose(rec.at("sensor_pose"), "sensor_pose");
      if (rec.contains("objects")) {
        const auto& objs = jf::object(rec, "", "objects");
        for (auto it = objs.begin(); it != objs.end(); ++it) {
          frame.object_poses.emplace(it.key(), jf::pose(it.value(), "objects." + it.key()));
        }
      }
      traj.frames.push_back(std::move(frame));
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  return traj;
}

inline Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory '" + path.string() + "'");
  return read_trajectory(in, path.string());
}

inline std::string trajectory_line(const TrajectoryFrame& f) {
  namespace jf = json_fields;
  jf::json objects = jf::json::object();
  for (const auto& [name, pose] : f.object_poses) objects[name] = jf::to_json(pose);
  jf::json rec{{"ts", f.ts}, {"sensor_pose", jf::to_json(f.sensor_pose)}, {"objects", objects}};
  return rec.dump();
}

inline void write_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write trajectory '" + path.string() + "'");
  for (const auto& f : traj.frames) out << trajectory_line(f) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

struct PressProfile {
  std::string object;                     // object name in the scene
  Vec3 axis = Vec3::UnitZ();              // outward surface normal at the contact site
  double start_clearance = 0.002;         // m above the surface at frame 0
  double end_depth = 0.001;               // m below the surface at the last pressing frame
  int steps = 6;                          // pressing frames, >= 2
  int dwell = 0;                          // extra frames held at end_depth
  double dt = 0.01;                       // s between frames
  Vec3 lateral_offset = Vec3::Zero();     // component along axis is ignored
};

// Linear press of one object along -axis: the object's tip (its extreme
// vertex along -axis) goes from +start_clearance to -end_depth over
// `steps` frames. The sensor stays at identity.
inline Trajectory make_press_trajectory(const Scene& scene, const PressProfile& p) {
  const Body* body = scene.find_body(p.object);
  if (body == nullptr) throw InputError("unknown object '" + p.object + "'");
  if (p.steps < 2) throw InputError("press needs at least 2 steps");
  if (p.dwell < 0) throw InputError("dwell must be >= 0");
  if (!(p.start_clearance > 0.0)) throw InputError("start clearance must be > 0");
  if (!(p.end_depth > 0.0) || p.end_depth > scene.grid.d_max()) {
    throw InputError("end depth must be in (0, d_max]");
  }
  if (!(p.dt > 0.0)) throw InputError("dt must be > 0");
  const double axis_norm = p.axis.norm();
  if (!(axis_norm > 0.0)) throw InputError("press axis must be nonzero");
  const Vec3 axis = p.axis / axis_norm;
  double tip = std::numeric_limits<double>::infinity();
  for (const auto& v : body->mesh.vertices()) tip = std::min(tip, v.dot(axis));
  const Vec3 lateral = p.lateral_offset - p.lateral_offset.dot(axis) * axis;

  Trajectory traj;
  const int total = p.steps + p.dwell;
  for (int k = 0; k < total; ++k) {
    const int step = std::min(k, p.steps - 1);
    const double height = p.start_clearance +
                          (-p.end_depth - p.start_clearance) * step / static_cast<double>(p.steps - 1);
    TrajectoryFrame frame;
    frame.ts = k * p.dt;
    frame.object_poses.emplace(p.object, RigidPose::from_translation((height - tip) * axis + lateral));
    traj.frames.push_back(std::move(frame));
  }
  return traj;
}

}  // namespace tacmap
