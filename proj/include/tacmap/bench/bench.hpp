#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <new>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sys/resource.h>
#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "tacmap/error.hpp"
#include "tacmap/io/digest.hpp"
#include "tacmap/parallel.hpp"
#include "tacmap/render/renderer.hpp"
#include "tacmap/replay/scene_config.hpp"
#include "tacmap/version.hpp"

namespace tacmap {

struct BenchConfig {
  std::vector<std::size_t> env_counts{16, 64, 256, 1024, 4096, 8192};
  std::size_t frames = 4;
  std::size_t warmup = 1;
  std::uint64_t seed = 42;
};

struct BenchRow {
  std::size_t env_count = 0;
  std::size_t frames = 0;
  double wall_seconds = 0.0;
  double total_renders_per_sec = 0.0;
  double per_env_renders_per_sec = 0.0;
  std::uint64_t peak_mem_bytes = 0;
  std::string status = "ok";        // ok | failed
  std::string first_env_checksum;   // SHA-256 of env 0's TMAP bytes, last measured frame
  bool checksum_matches_single = false;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  unsigned hardware_threads = 0;
  std::size_t worker_threads = 0;
  std::string toolkit_version = kVersion;
  std::string memory_source;
  bool partial = false;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares y = slope * x + intercept.
inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("fit inputs differ in length");
  if (x.size() < 3) throw InputError("linear fit needs at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InputError("linear fit needs distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

// Peak memory vs environment count over the successful rows.
inline LinearFit fit_linear_memory(const BenchResult& result) {
  std::vector<double> x, y;
  for (const auto& row : result.rows) {
    if (row.status != "ok") continue;
    x.push_back(static_cast<double>(row.env_count));
    y.push_back(static_cast<double>(row.peak_mem_bytes));
  }
  if (x.size() < 3) throw InputError("memory fit needs at least 3 successful env counts");
  return least_squares(x, y);
}

namespace detail {

// Resident-set high-water mark. On Linux the mark is reset per measurement
// through /proc/self/clear_refs; elsewhere getrusage's process-wide peak is
// used, which is still valid for ascending env counts.
class PeakMemory {
 public:
  PeakMemory() {
    std::ifstream probe("/proc/self/status");
    has_proc_ = static_cast<bool>(probe);
    if (has_proc_) {
      std::ofstream reset("/proc/self/clear_refs");
      can_reset_ = static_cast<bool>(reset << "5") && static_cast<bool>(reset.flush());
    }
  }

  std::string source() const {
    if (has_proc_ && can_reset_) return "linux VmHWM (reset via /proc/self/clear_refs)";
    if (has_proc_) return "linux VmHWM (process lifetime)";
    return "getrusage ru_maxrss";
  }

  void reset() {
#if defined(__GLIBC__)
    malloc_trim(0);
#endif
    if (can_reset_) {
      std::ofstream reset("/proc/self/clear_refs");
      reset << "5";
    }
  }

  std::uint64_t peak_bytes() const {
    if (has_proc_) {
      std::ifstream status("/proc/self/status");
      std::string line;
      while (std::getline(status, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
          std::istringstream fields(line.substr(6));
          std::uint64_t kb = 0;
          fields >> kb;
          return kb * 1024;
        }
      }
    }
    rusage usage{};
    getrusage(RUSAGE_SELF, &usage);
    return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;
  }

 private:
  bool has_proc_ = false;
  bool can_reset_ = false;
};

}  // namespace detail

// Random poses around a nominal press: each object is rotated about the
// sensor normal, shifted laterally within the middle half of the grid, and
// placed with its tip between d_max below and d_max / 2 above the surface.
class ScenePoseSampler {
 public:
  ScenePoseSampler(const Scene& scene, std::uint64_t seed) : scene_(scene), rng_(seed) {
    Aabb grid_box;
    for (const auto& p : scene.grid.points) grid_box.extend(p);
    half_span_ = 0.25 * grid_box.extent();
    for (const auto& body : scene.bodies) {
      double tip = std::numeric_limits<double>::infinity();
      for (const auto& v : body->mesh.vertices()) tip = std::min(tip, v.z());
      tips_.push_back(tip);
    }
  }

  SceneState next() {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double d_max = scene_.grid.d_max();
    std::uniform_real_distribution<double> height(-d_max, 0.5 * d_max);
    SceneState state;
    for (std::size_t i = 0; i < scene_.bodies.size(); ++i) {
      const double yaw = angle(rng_);
      const double x = half_span_.x() * unit(rng_);
      const double y = half_span_.y() * unit(rng_);
      const double z = height(rng_) - tips_[i];
      state.objects.push_back(
          {scene_.bodies[i], RigidPose::from_axis_angle(Vec3::UnitZ(), yaw, Vec3(x, y, z))});
    }
    return state;
  }

 private:
  const Scene& scene_;
  std::mt19937_64 rng_;
  Vec3 half_span_ = Vec3::Zero();
  std::vector<double> tips_;
};

inline std::string map_checksum(const DeformMap& map) { return sha256_hex(tmap::encode(map)); }

// For each env count: allocate the batch, warm up, then time render_batch
// over cfg.frames batches of freshly sampled poses. Poses depend only on
// (seed, env count). A failing count is recorded and the run continues.
inline BenchResult run_bench(const Scene& scene, const BenchConfig& cfg,
                             const std::function<void(const BenchRow&)>& on_row = {}) {
  if (cfg.frames < 1) throw InputError("bench frames must be >= 1");
  if (cfg.env_counts.empty()) throw InputError("bench needs at least one env count");
  for (std::size_t i = 0; i < cfg.env_counts.size(); ++i) {
    if (cfg.env_counts[i] == 0) throw InputError("env counts must be positive");
    if (i > 0 && cfg.env_counts[i] <= cfg.env_counts[i - 1]) {
      throw InputError("env counts must be strictly ascending");
    }
  }
  BenchResult result;
  result.hardware_threads = std::thread::hardware_concurrency();
  result.worker_threads = ThreadLimit::active_parallelism();
  detail::PeakMemory memory;
  result.memory_source = memory.source();

  for (const std::size_t count : cfg.env_counts) {
    BenchRow row;
    row.env_count = count;
    row.frames = cfg.frames;
    try {
      memory.reset();
      ScenePoseSampler sampler(scene, cfg.seed ^ (0x9e3779b97f4a7c15ULL * count));
      std::vector<SceneState> batch(count);
      std::vector<DeformMap> maps;
      double seconds = 0.0;
      for (std::size_t f = 0; f < cfg.warmup + cfg.frames; ++f) {
        for (auto& s : batch) s = sampler.next();
        maps.clear();
        const auto t0 = std::chrono::steady_clock::now();
        maps = render_batch(scene.grid, batch, scene.config.render);
        const auto t1 = std::chrono::steady_clock::now();
        if (f >= cfg.warmup) seconds += std::chrono::duration<double>(t1 - t0).count();
      }
      row.peak_mem_bytes = memory.peak_bytes();
      row.wall_seconds = seconds;
      row.total_renders_per_sec = static_cast<double>(count * cfg.frames) / seconds;
      row.per_env_renders_per_sec = row.total_renders_per_sec / static_cast<double>(count);
      row.first_env_checksum = map_checksum(maps.front());
      row.checksum_matches_single =
          map_checksum(render_deform_map(scene.grid, batch.front(), scene.config.render)) ==
          row.first_env_checksum;
    } catch (const std::bad_alloc&) {
      row.status = "failed";
      result.partial = true;
    }
    result.rows.push_back(row);
    if (on_row) on_row(row);
  }
  return result;
}

inline std::string bench_csv(const BenchResult& result) {
  std::ostringstream out;
  out.precision(10);
  out << "env_count,frames,total_renders_per_sec,per_env_renders_per_sec,peak_mem_bytes,status\n";
  for (const auto& r : result.rows) {
    out << r.env_count << ',' << r.frames << ',' << r.total_renders_per_sec << ','
        << r.per_env_renders_per_sec << ',' << r.peak_mem_bytes << ',' << r.status << '\n';
  }
  return out.str();
}

}  // namespace tacmap
