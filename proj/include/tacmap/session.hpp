#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tacmap/contact/signals.hpp"
#include "tacmap/error.hpp"
#include "tacmap/render/renderer.hpp"
#include "tacmap/replay/scene_config.hpp"
#include "tacmap/replay/trajectory.hpp"

namespace tacmap {

// Multi-environment state over one loaded scene: the surface a scripting
// adapter wraps. Holds poses only; all numerics go through render_batch and
// compute_signals. Confined to one thread at a time.
class Session {
 public:
  Session(std::shared_ptr<const Scene> scene, std::size_t num_envs) : scene_(std::move(scene)) {
    if (!scene_) throw InputError("session needs a scene");
    if (num_envs == 0) throw InputError("num_envs must be >= 1");
    frames_.resize(num_envs);
    for (auto& f : frames_) {
      for (const auto& body : scene_->bodies) f.object_poses.emplace(body->name, RigidPose{});
    }
  }

  static Session open(const std::filesystem::path& scene_path, std::size_t num_envs) {
    return Session(std::make_shared<const Scene>(load_scene(scene_path)), num_envs);
  }

  std::size_t num_envs() const { return frames_.size(); }
  const Scene& scene() const { return *scene_; }
  bool closed() const { return closed_; }
  void close() { closed_ = true; }

  void set_poses(std::size_t env, const RigidPose& sensor_pose,
                 const std::map<std::string, RigidPose>& object_poses) {
    require_open();
    if (env >= frames_.size()) {
      throw InputError("env index " + std::to_string(env) + " out of range");
    }
    for (const auto& [name, pose] : object_poses) {
      if (scene_->find_body(name) == nullptr) throw InputError("unknown object '" + name + "'");
    }
    frames_[env].sensor_pose = sensor_pose;
    for (const auto& [name, pose] : object_poses) frames_[env].object_poses[name] = pose;
  }

  void set_all_poses(const RigidPose& sensor_pose,
                     const std::map<std::string, RigidPose>& object_poses) {
    for (std::size_t env = 0; env < frames_.size(); ++env) set_poses(env, sensor_pose, object_poses);
  }

  std::vector<DeformMap> render() const {
    require_open();
    std::vector<SceneState> states;
    states.reserve(frames_.size());
    for (const auto& f : frames_) states.push_back(scene_state_for(*scene_, f));
    return render_batch(scene_->grid, states, scene_->config.render);
  }

  std::vector<ContactSignals> signals() const {
    std::vector<ContactSignals> out;
    for (const auto& map : render()) {
      out.push_back(compute_signals(map, scene_->grid, scene_->config.tau, scene_->config.force));
    }
    return out;
  }

 private:
  void require_open() const {
    if (closed_) throw InputError("session is closed");
  }

  std::shared_ptr<const Scene> scene_;
  std::vector<TrajectoryFrame> frames_;
  bool closed_ = false;
};

}  // namespace tacmap
