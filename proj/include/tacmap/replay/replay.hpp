#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "tacmap/contact/signals.hpp"
#include "tacmap/contact/signals_json.hpp"
#include "tacmap/error.hpp"
#include "tacmap/io/digest.hpp"
#include "tacmap/render/deform_map.hpp"
#include "tacmap/render/renderer.hpp"
#include "tacmap/replay/scene_config.hpp"
#include "tacmap/replay/trajectory.hpp"
#include "tacmap/version.hpp"

namespace tacmap {

struct ReplayOptions {
  // Keep this many evenly spaced frames (first and last included).
  std::optional<std::size_t> subsample;
  // Frames rendered per render_batch call.
  std::size_t chunk = 256;
};

struct ReplayOutput {
  std::vector<std::size_t> frame_indices;  // trajectory index of each emitted frame
  std::vector<std::filesystem::path> tmap_files;
  std::vector<std::filesystem::path> signal_files;
  std::filesystem::path manifest;
  std::size_t size() const { return tmap_files.size(); }
};

inline std::vector<std::size_t> subsample_indices(std::size_t n, std::optional<std::size_t> keep) {
  std::vector<std::size_t> out;
  if (!keep || *keep >= n) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  if (*keep == 0) throw InputError("subsample count must be >= 1");
  if (*keep == 1) return {0};
  for (std::size_t k = 0; k < *keep; ++k) {
    out.push_back(static_cast<std::size_t>(
        std::llround(static_cast<double>(k) * static_cast<double>(n - 1) /
                     static_cast<double>(*keep - 1))));
  }
  return out;
}

inline std::string frame_stem(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06zu", i);
  return buf;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// Frame files left over from an earlier, longer run would be orphans.
inline void remove_stale_frames(const std::filesystem::path& dir,
                                const std::set<std::string>& keep) {
  static const std::regex pattern(R"(frame_\d{6}\.(tmap|json))");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, pattern) && !keep.count(name)) {
      std::filesystem::remove(entry.path());
    }
  }
}

}  // namespace detail

// Renders every selected frame and writes frame_NNNNNN.tmap, the matching
// signals record frame_NNNNNN.json, and manifest.json. Output bytes depend
// only on the scene and trajectory.
inline ReplayOutput replay(const Scene& scene, const Trajectory& traj,
                           const std::filesystem::path& out_dir, const ReplayOptions& opts = {}) {
  validate(traj, scene);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory '" + out_dir.string() + "'");
  }
  const std::vector<std::size_t> selected = subsample_indices(traj.size(), opts.subsample);

  ReplayOutput output;
  output.frame_indices = selected;
  nlohmann::json frames = nlohmann::json::array();
  std::set<std::string> written;
  const std::size_t chunk = std::max<std::size_t>(1, opts.chunk);
  for (std::size_t start = 0; start < selected.size(); start += chunk) {
    const std::size_t end = std::min(selected.size(), start + chunk);
    std::vector<SceneState> states;
    for (std::size_t k = start; k < end; ++k) {
      states.push_back(scene_state_for(scene, traj.frames[selected[k]]));
    }
    const auto maps = render_batch(scene.grid, states, scene.config.render);
    // Single writer, in frame order.
    for (std::size_t k = start; k < end; ++k) {
      const std::size_t idx = selected[k];
      const DeformMap& map = maps[k - start];
      const std::string stem = frame_stem(k);
      const auto tmap_path = out_dir / (stem + ".tmap");
      const auto signal_path = out_dir / (stem + ".json");
      tmap::write(map, tmap_path);
      const ContactSignals sig =
          compute_signals(map, scene.grid, scene.config.tau, scene.config.force);
      nlohmann::json record = signals_to_json(sig);
      record["frame"] = k;
      record["trajectory_index"] = idx;
      record["ts"] = traj.frames[idx].ts;
      detail::write_text(signal_path, record.dump(2) + "\n");
      frames.push_back({{"frame", k},
                        {"trajectory_index", idx},
                        {"ts", traj.frames[idx].ts},
                        {"tmap", tmap_path.filename().string()},
                        {"signals", signal_path.filename().string()}});
      written.insert(tmap_path.filename().string());
      written.insert(signal_path.filename().string());
      output.tmap_files.push_back(tmap_path);
      output.signal_files.push_back(signal_path);
    }
  }

  Sha256 traj_digest;
  for (const auto& f : traj.frames) traj_digest.update(trajectory_line(f)).update("\n");
  nlohmann::json manifest{{"toolkit_version", kVersion},
                          {"config_hash", scene.config_hash},
                          {"trajectory_hash", traj_digest.hex()},
                          {"frame_count", selected.size()},
                          {"grid",
                           {{"H", scene.grid.rows()},
                            {"W", scene.grid.cols()},
                            {"delta_m", scene.grid.delta()},
                            {"d_max_m", scene.grid.d_max()}}},
                          {"frames", frames}};
  output.manifest = out_dir / "manifest.json";
  detail::write_text(output.manifest, manifest.dump(2) + "\n");
  detail::remove_stale_frames(out_dir, written);
  return output;
}

}  // namespace tacmap
