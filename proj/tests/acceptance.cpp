// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "tacmap/tacmap.hpp"

namespace {

using namespace tacmap;
namespace tt = tacmap::testing;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s  %-26s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Icosphere R = 5 mm (4 subdivisions) pressed 1 mm into a 20 mm, 64x64 pad.
Outcome sphere_plane() {
  const double R = 5e-3, press = 1e-3, pitch = 0.02 / 64;
  const auto t0 = std::chrono::steady_clock::now();
  const auto grid = generate_sensing_grid(FlatRect{0.02, 0.02}, {64, 64, 0.0, 0.002});
  SceneState scene;
  scene.objects.push_back({make_body("sphere", primitives::icosphere(R, 4)),
                           RigidPose::from_translation(Vec3(0, 0, R - press))});
  const DeformMap map = render_deform_map(grid, scene);
  const double runtime = seconds_since(t0);

  double worst = 0.0, outer_active = 0.0, inner_zero = 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.points[i].head<2>().norm();
    if (r <= 0.9 * 3e-3) {
      worst = std::max(worst, std::abs(map[i] - tt::sphere_plane_depth(R, press, r)));
    }
    if (map[i] > 0.0) outer_active = std::max(outer_active, r);
    else inner_zero = std::min(inner_zero, r);
  }
  const double rc = tt::sphere_plane_contact_radius(R, press);
  const double boundary_err = std::max(std::abs(outer_active - rc), std::abs(inner_zero - rc));
  const bool ok = worst <= 0.02 * press && boundary_err <= pitch && runtime < 1.0;
  return {ok, fmt("max |err| %.4f mm (tol 0.02) for r<=2.7 mm; boundary %.4f/%.4f mm vs 3 mm "
                  "(tol %.4f); %.3f s (tol 1 s)",
                  worst * 1e3, outer_active * 1e3, inner_zero * 1e3, pitch * 1e3, runtime)};
}

// Spherical cap R = 10 mm, 60 deg, flat plate 0.5 mm onto the apex.
Outcome curved_fingertip() {
  const double R = 0.01, press = 0.0005;
  const auto grid = generate_sensing_grid(SphericalCap{R, std::numbers::pi / 3}, {64, 64, 0.0, 0.002});
  SceneState scene;
  scene.objects.push_back({make_body("plate", primitives::box(Vec3(0.02, 0.02, 0.005))),
                           RigidPose::from_translation(Vec3(0, 0, 0.005 - press))});
  const DeformMap map = render_deform_map(grid, scene);
  const double theta_c = std::acos((R - press) / R);
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double polar = std::acos(-grid.inward_normals[i].z());
    if (polar > 0.9 * theta_c) continue;
    worst = std::max(worst, std::abs(map[i] - tt::cap_plane_depth(R, press, polar)));
    ++checked;
  }
  return {checked > 0 && worst <= 0.02 * press,
          fmt("max |err| %.2e mm (tol 0.01 mm) over %zu pixels with polar <= %.2f deg", worst * 1e3,
              checked, 0.9 * theta_c * 180 / std::numbers::pi)};
}

Outcome ray_oracle() {
  const auto mesh = tt::random_triangle_soup(200, 20240601);
  const auto bvh = build_bvh(mesh);
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> coord(-2.0, 2.0), bary(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> pick(0, 199);
  std::size_t mismatches = 0, hits = 0;
  double worst_dt = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 origin(coord(rng), coord(rng), coord(rng));
    Vec3 dir;
    if (i % 2 == 0) {
      // Aim at a random point of a random triangle so most rays hit.
      const std::uint32_t tri = pick(rng);
      double a = bary(rng), b = bary(rng);
      if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
      }
      const Vec3 target =
          (1 - a - b) * mesh.vertex(tri, 0) + a * mesh.vertex(tri, 1) + b * mesh.vertex(tri, 2);
      dir = (target - origin).normalized();
    } else {
      dir = tt::random_unit(rng);
    }
    const Ray ray = Ray::make(origin, dir, 10.0);
    const auto got = bvh.closest(mesh, ray, FacingFilter::any);
    const auto want = tt::brute_force_first_hit(mesh, ray, FacingFilter::any);
    if (got.has_value() != want.has_value()) {
      ++mismatches;
      continue;
    }
    if (!got) continue;
    ++hits;
    const double dt = std::abs(got->t - want->t);
    worst_dt = std::max(worst_dt, dt);
    if (got->triangle != want->triangle || dt > 1e-9) ++mismatches;
  }
  return {mismatches == 0,
          fmt("%zu mismatches over 1000 rays (%zu hits), max |dt| %.1e (tol 1e-9)", mismatches, hits,
              worst_dt)};
}

// Independent depth oracle for convex objects: clip each probe ray against
// the face half-spaces in the world frame. No BVH, no triangle test.
double convex_probe_depth(const TriangleMesh& world_mesh, const Vec3& o, const Vec3& d,
                          double t_max, double delta, double d_max) {
  double t_in = -std::numeric_limits<double>::infinity();
  double t_out = std::numeric_limits<double>::infinity();
  for (std::uint32_t f = 0; f < world_mesh.num_triangles(); ++f) {
    const Vec3& n = world_mesh.normals()[f];
    const double dist = n.dot(o - world_mesh.vertex(f, 0));  // > 0 outside
    const double rate = n.dot(d);
    if (rate == 0.0) {
      if (dist > 0.0) return 0.0;
      continue;
    }
    const double t = -dist / rate;
    if (rate > 0.0) t_out = std::min(t_out, t);
    else t_in = std::max(t_in, t);
  }
  if (t_in > t_out || t_out < 0.0 || t_in > t_max) return 0.0;
  return std::clamp(t_out - delta, 0.0, d_max);
}

struct RandomScene {
  SensingGrid grid;
  SceneState state;
};

RandomScene random_scene(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> variant(0, 2), count(1, 3), kind(0, 2);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  GridParams params{24, 24, u01(rng) < 0.5 ? 0.0 : 2e-4, 0.002};
  SensorSurfaceSpec spec;
  switch (variant(rng)) {
    case 0: spec = FlatRect{0.02, 0.02}; break;
    case 1: spec = SphericalCap{0.01, std::numbers::pi / 3}; break;
    default: spec = CylindricalPatch{0.01, 0.02, std::numbers::pi / 4}; break;
  }
  RandomScene s{generate_sensing_grid(spec, params), {}};
  s.state.sensor_pose = RigidPose(tt::random_rotation(rng), 0.05 * tt::random_unit(rng));
  const int n = count(rng);
  for (int k = 0; k < n; ++k) {
    TriangleMesh mesh;
    switch (kind(rng)) {
      case 0: mesh = primitives::icosphere(0.003 + 0.005 * u01(rng), 3); break;
      case 1:
        mesh = primitives::box(Vec3(0.002 + 0.01 * u01(rng), 0.002 + 0.01 * u01(rng),
                                    0.002 + 0.01 * u01(rng)));
        break;
      default: mesh = primitives::cylinder(0.002 + 0.004 * u01(rng), 0.01, 32, Vec3(0, 0, -0.005));
    }
    const Vec3 local(0.012 * (u01(rng) - 0.5), 0.012 * (u01(rng) - 0.5), 0.016 * (u01(rng) - 0.5));
    const RigidPose in_sensor(tt::random_rotation(rng), local);
    s.state.objects.push_back({make_body("obj" + std::to_string(k), std::move(mesh)),
                               s.state.sensor_pose * in_sensor});
  }
  return s;
}

Outcome equation_semantics() {
  std::mt19937_64 rng(777);
  std::size_t out_of_range = 0, engulf_bad = 0, miss_bad = 0, oracle_bad = 0, frame_bad = 0;
  std::size_t engulfed = 0, misses = 0, pixels = 0;
  double worst_oracle = 0.0, worst_frame = 0.0;
  for (int sc = 0; sc < 100; ++sc) {
    const RandomScene s = random_scene(rng);
    const DeformMap map = render_deform_map(s.grid, s.state);
    const double t_max = RenderConfig{}.resolved_t_max(s.grid);
    const double d_max = s.grid.d_max();
    const WorldGrid world = grid_world_points(s.grid, s.state.sensor_pose);
    std::vector<TriangleMesh> world_meshes;
    for (const auto& obj : s.state.objects) world_meshes.push_back(obj.body->mesh.transformed(obj.pose));

    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      ++pixels;
      if (!(map[i] >= 0.0 && map[i] <= d_max)) ++out_of_range;
      double want = 0.0;
      for (const auto& wm : world_meshes) {
        want = std::max(want, convex_probe_depth(wm, world.points[i], world.inward_normals[i], t_max,
                                                 s.grid.delta(), d_max));
      }
      if (want == d_max) {
        ++engulfed;
        if (map[i] != d_max) ++engulf_bad;
      } else if (want == 0.0) {
        ++misses;
        if (map[i] != 0.0) ++miss_bad;
      }
      const double err = std::abs(map[i] - want);
      worst_oracle = std::max(worst_oracle, err);
      if (err > 1e-9) ++oracle_bad;
    }

    const RigidPose common(tt::random_rotation(rng), 0.1 * tt::random_unit(rng));
    SceneState moved = s.state;
    moved.sensor_pose = common * moved.sensor_pose;
    for (auto& obj : moved.objects) obj.pose = common * obj.pose;
    const DeformMap moved_map = render_deform_map(s.grid, moved);
    for (std::size_t i = 0; i < map.size(); ++i) {
      const double diff = std::abs(moved_map[i] - map[i]);
      worst_frame = std::max(worst_frame, diff);
      if (diff > 1e-9) ++frame_bad;
    }
  }
  const bool ok = out_of_range == 0 && engulf_bad == 0 && miss_bad == 0 && oracle_bad == 0 &&
                  frame_bad == 0 && engulfed > 0 && misses > 0;
  return {ok, fmt("100 scenes, %zu px: range viol %zu, engulfed %zu (bad %zu), misses %zu (bad %zu), "
                  "oracle >1e-9 %zu (max %.1e), frame >1e-9 %zu (max %.1e)",
                  pixels, out_of_range, engulfed, engulf_bad, misses, miss_bad, oracle_bad,
                  worst_oracle, frame_bad, worst_frame)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome batch_correctness() {
  const Scene scene = load_scene(tt::data_dir() / "press_fixture" / "scene.json");
  ScenePoseSampler sampler(scene, 99);
  std::mt19937_64 rng(100);
  std::vector<SceneState> scenes;
  for (int k = 0; k < 1024; ++k) {
    SceneState s = sampler.next();
    // Move sensor and objects together so sensor poses vary too.
    const RigidPose common(tt::random_rotation(rng), 0.02 * tt::random_unit(rng));
    s.sensor_pose = common;
    for (auto& obj : s.objects) obj.pose = common * obj.pose;
    scenes.push_back(std::move(s));
  }
  const auto batch = render_batch(scene.grid, scenes, scene.config.render);
  std::size_t differing = 0, in_contact = 0;
  for (std::size_t k = 0; k < scenes.size(); ++k) {
    const DeformMap single = render_deform_map(scene.grid, scenes[k], scene.config.render);
    if (!(single == batch[k])) ++differing;
    if (single.max_depth() > 0.0) ++in_contact;
  }

  const auto traj = read_trajectory(tt::data_dir() / "press_fixture" / "press.jsonl");
  const auto a = replay(scene, traj, tt::scratch_dir("accept_replay_a"));
  const auto b = replay(scene, traj, tt::scratch_dir("accept_replay_b"));
  std::size_t file_diffs = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    file_diffs += slurp(a.tmap_files[k]) != slurp(b.tmap_files[k]);
    file_diffs += slurp(a.signal_files[k]) != slurp(b.signal_files[k]);
  }
  file_diffs += slurp(a.manifest) != slurp(b.manifest);
  return {differing == 0 && file_diffs == 0 && a.size() == 6,
          fmt("1024 scenes (%zu in contact): %zu differ from sequential; replay rerun of %zu frames: "
              "%zu differing files",
              in_contact, differing, a.size(), file_diffs)};
}

Outcome metric_oracles() {
  auto rel = [](double got, double want) {
    return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
  };
  const double tau = kDefaultContactThreshold;
  DeformMap a(2, 3, 0.002), b(2, 3, 0.002), c(2, 3, 0.002);
  a(0, 0) = a(0, 1) = 0.001;
  b(0, 1) = b(0, 2) = 0.001;
  c(1, 0) = c(1, 1) = 0.001;
  const double iou_same = deform_iou(a, a, tau);
  const double iou_disjoint = deform_iou(a, c, tau);
  const double iou_third = deform_iou(a, b, tau);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> depth(1e-4, 1.6e-3);
  DeformMap ref(16, 16, 0.002);
  for (auto& d : ref.depths()) d = depth(rng);
  DeformMap scaled = ref;
  for (auto& d : scaled.depths()) d *= 1.2;
  const double derr = depth_error(scaled, ref, tau);

  ContactSignals p, q;
  p.centroid_point = Vec3::Zero();
  q.centroid_point = Vec3(0.003, 0.004, 0.0);
  const double perr = position_error(p, q);

  const double worst = std::max({rel(iou_same, 1.0), std::abs(iou_disjoint), rel(iou_third, 1.0 / 3),
                                 rel(derr, 0.20), rel(perr, 0.005)});
  return {worst <= 1e-12,
          fmt("iou %.15g/%.15g/%.15g, depth_error %.15g, position_error %.15g m; max rel err %.1e "
              "(tol 1e-12)",
              iou_same, iou_disjoint, iou_third, derr, perr, worst)};
}

Outcome scaling_protocol() {
  const Scene scene = load_scene(tt::data_dir() / "press_fixture" / "scene.json");
  BenchConfig cfg;
  cfg.env_counts = {16, 32, 64, 128, 256, 512, 1024};
  cfg.frames = 3;
  cfg.warmup = 1;
  const auto t0 = std::chrono::steady_clock::now();
  const BenchResult result = run_bench(scene, cfg);
  const double wall = seconds_since(t0);
  const LinearFit fit = fit_linear_memory(result);
  const BenchRow& first = result.rows.front();
  const BenchRow& last = result.rows.back();
  // Cost per environment-render may grow at most 2x from 16 to 1024 envs.
  const double ratio = first.total_renders_per_sec / last.total_renders_per_sec;
  bool checksums = true;
  for (const auto& r : result.rows) checksums = checksums && r.status == "ok" && r.checksum_matches_single;
  const bool ok = fit.r_squared >= 0.99 && ratio <= 2.0 && wall < 300.0 && checksums;
  return {ok, fmt("memory R^2 %.4f (tol 0.99), %.0f B/env; renders/s %.0f @16 vs %.0f @1024, "
                  "ratio %.2f (tol 2.0); %.1f s (tol 300 s); host threads %u, workers %zu%s",
                  fit.r_squared, fit.slope, first.total_renders_per_sec, last.total_renders_per_sec,
                  ratio, wall, result.hardware_threads, result.worker_threads,
                  result.hardware_threads < 8 ? " (below the 8-core reference host)" : "")};
}

}  // namespace

int main() {
  const auto limit = ThreadLimit::from_env();
  std::printf("tacmap %s acceptance suite\n", kVersion);
  // Scaling runs first so its memory baseline is not inflated by the
  // large batches of the other checks.
  report("scaling_protocol", scaling_protocol);
  report("sphere_plane_fidelity", sphere_plane);
  report("curved_fingertip_fidelity", curved_fingertip);
  report("ray_oracle_equivalence", ray_oracle);
  report("equation_semantics", equation_semantics);
  report("batch_and_replay", batch_correctness);
  report("metric_oracles", metric_oracles);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
