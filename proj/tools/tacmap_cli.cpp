// tacmap command-line interface. All lengths are meters; quaternions are
// w,x,y,z. JSON goes to stdout, diagnostics to stderr.
//
// Exit codes: 0 ok, 2 usage/input error, 3 I/O error, 4 internal error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tacmap/tacmap.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

std::vector<double> parse_numbers(const std::string& text, std::size_t expected,
                                  const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw tacmap::InputError(field + ": '" + item + "' is not a number");
    }
  }
  if (out.size() != expected) {
    throw tacmap::InputError(field + ": expected " + std::to_string(expected) +
                             " comma-separated numbers, got " + std::to_string(out.size()));
  }
  return out;
}

// "w,x,y,z,tx,ty,tz"
tacmap::RigidPose parse_pose(const std::string& text, const std::string& field) {
  const auto v = parse_numbers(text, 7, field);
  try {
    return tacmap::RigidPose::from_approximate(tacmap::Quat(v[0], v[1], v[2], v[3]),
                                               tacmap::Vec3(v[4], v[5], v[6]));
  } catch (const tacmap::InputError& e) {
    throw tacmap::InputError(field + " quaternion: " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw tacmap::IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw tacmap::IoError("failed writing '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw tacmap::IoError("cannot create output directory '" + dir.string() + "'");
  }
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// --- render -----------------------------------------------------------------

struct RenderArgs {
  std::string scene;
  std::string sensor_pose;
  std::vector<std::string> object_poses;
  std::string out;
  std::string pgm;
  std::string csv;
};

int cmd_render(const RenderArgs& args) {
  const tacmap::Scene scene = tacmap::load_scene(args.scene);
  tacmap::TrajectoryFrame frame;
  if (!args.sensor_pose.empty()) frame.sensor_pose = parse_pose(args.sensor_pose, "--sensor-pose");
  for (const auto& body : scene.bodies) frame.object_poses.emplace(body->name, tacmap::RigidPose{});
  for (const auto& spec : args.object_poses) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw tacmap::InputError("--object-pose: expected NAME=w,x,y,z,tx,ty,tz, got '" + spec + "'");
    }
    const std::string name = spec.substr(0, eq);
    if (scene.find_body(name) == nullptr) {
      throw tacmap::InputError("--object-pose: unknown object '" + name + "'");
    }
    frame.object_poses[name] = parse_pose(spec.substr(eq + 1), "--object-pose " + name);
  }
  const auto map = tacmap::render_deform_map(scene.grid, tacmap::scene_state_for(scene, frame),
                                             scene.config.render);
  tacmap::tmap::write(map, args.out);
  if (!args.pgm.empty()) tacmap::write_pgm(map, args.pgm);
  if (!args.csv.empty()) tacmap::write_csv(map, args.csv);
  const auto sig = tacmap::compute_signals(map, scene.grid, scene.config.tau, scene.config.force);
  json summary{{"out", args.out},
               {"H", map.rows()},
               {"W", map.cols()},
               {"max_depth_m", sig.max_depth},
               {"contact_area_m2", sig.contact_area},
               {"signals", tacmap::signals_to_json(sig)}};
  std::cout << summary.dump(2) << std::endl;
  return kExitOk;
}

// --- replay -----------------------------------------------------------------

struct ReplayArgs {
  std::string scene;
  std::string trajectory;
  std::string out;
  std::size_t subsample = 0;
};

int cmd_replay(const ReplayArgs& args) {
  const tacmap::Scene scene = tacmap::load_scene(args.scene);
  const tacmap::Trajectory traj = tacmap::read_trajectory(fs::path(args.trajectory));
  tacmap::ReplayOptions opts;
  if (args.subsample > 0) opts.subsample = args.subsample;
  const auto output = tacmap::replay(scene, traj, args.out, opts);
  json summary{{"frames", output.size()}, {"manifest", output.manifest.string()}};
  std::cout << summary.dump(2) << std::endl;
  return kExitOk;
}

// --- compare ----------------------------------------------------------------

struct CompareArgs {
  std::string a;
  std::string b;
  std::optional<double> tau;
  std::string scene;
  std::string out;
};

std::vector<fs::path> tmap_sequence(const fs::path& path) {
  if (!fs::exists(path)) throw tacmap::InputError("'" + path.string() + "' does not exist");
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tmap") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw tacmap::InputError("no .tmap files in '" + path.string() + "'");
  return files;
}

int cmd_compare(const CompareArgs& args) {
  const auto files_a = tmap_sequence(args.a);
  const auto files_b = tmap_sequence(args.b);
  if (files_a.size() != files_b.size()) {
    throw tacmap::InputError("--a has " + std::to_string(files_a.size()) + " maps but --b has " +
                             std::to_string(files_b.size()));
  }
  std::vector<tacmap::DeformMap> maps_a, maps_b;
  for (const auto& f : files_a) maps_a.push_back(tacmap::tmap::read(f));
  for (const auto& f : files_b) maps_b.push_back(tacmap::tmap::read(f));
  for (std::size_t i = 0; i < maps_a.size(); ++i) {
    if (!maps_a[i].same_shape(maps_b[i])) {
      throw tacmap::InputError("shape mismatch at frame " + std::to_string(i) + ": " +
                               files_a[i].string() + " vs " + files_b[i].string());
    }
  }

  std::optional<tacmap::Scene> scene;
  if (!args.scene.empty()) scene = tacmap::load_scene(args.scene);
  const double tau = args.tau.value_or(scene ? scene->config.tau : tacmap::kDefaultContactThreshold);

  std::vector<tacmap::ContactSignals> sig_a, sig_b;
  if (scene) {
    for (std::size_t i = 0; i < maps_a.size(); ++i) {
      sig_a.push_back(tacmap::compute_signals(maps_a[i], scene->grid, tau, scene->config.force));
      sig_b.push_back(tacmap::compute_signals(maps_b[i], scene->grid, tau, scene->config.force));
    }
  }
  const auto report = tacmap::compare_sequences(maps_a, maps_b, tau, sig_a, sig_b);

  ensure_dir(args.out);
  std::ostringstream csv;
  csv.precision(12);
  csv << "frame,iou,depth_error,position_error_m,force_l2_N\n";
  json frames = json::array();
  auto cell = [](const std::optional<double>& v) {
    std::ostringstream s;
    s.precision(12);
    if (v) s << *v;
    return s.str();
  };
  for (std::size_t i = 0; i < report.frames.size(); ++i) {
    const auto& f = report.frames[i];
    csv << i << ',' << f.iou << ',' << cell(f.depth_error) << ',' << cell(f.position_error) << ','
        << cell(f.force_l2) << '\n';
    frames.push_back({{"frame", i},
                      {"a", files_a[i].filename().string()},
                      {"b", files_b[i].filename().string()},
                      {"iou", f.iou},
                      {"depth_error", optional_json(f.depth_error)},
                      {"position_error_m", optional_json(f.position_error)},
                      {"position_error_px", optional_json(f.position_error_px)},
                      {"force_l2_n", optional_json(f.force_l2)}});
  }
  json summary{{"tau_m", tau},
               {"frame_count", report.frames.size()},
               {"aggregate", "median"},
               {"iou", report.iou},
               {"depth_error", optional_json(report.depth_error)},
               {"position_error_m", optional_json(report.position_error)},
               {"position_error_px", optional_json(report.position_error_px)},
               {"force_l2_n", optional_json(report.force_l2)}};
  json doc = summary;
  doc["frames"] = frames;
  write_text(fs::path(args.out) / "compare.csv", csv.str());
  write_text(fs::path(args.out) / "compare.json", doc.dump(2) + "\n");
  std::cout << summary.dump(2) << std::endl;
  return kExitOk;
}

// --- bench ------------------------------------------------------------------

struct BenchArgs {
  std::string scene;
  std::string counts = "16,64,256,1024,4096,8192";
  std::size_t frames = 4;
  std::size_t warmup = 1;
  std::uint64_t seed = 42;
  std::string out;
};

int cmd_bench(const BenchArgs& args) {
  const tacmap::Scene scene = tacmap::load_scene(args.scene);
  tacmap::BenchConfig cfg;
  cfg.env_counts.clear();
  std::stringstream ss(args.counts);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      cfg.env_counts.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw tacmap::InputError("--counts: '" + item + "' is not a positive integer");
    }
  }
  cfg.frames = args.frames;
  cfg.warmup = args.warmup;
  cfg.seed = args.seed;
  ensure_dir(args.out);
  const auto result = tacmap::run_bench(scene, cfg, [](const tacmap::BenchRow& row) {
    std::cerr << "bench: " << row.env_count << " envs, " << row.total_renders_per_sec
              << " renders/s, peak " << row.peak_mem_bytes << " B, " << row.status << '\n';
  });
  write_text(fs::path(args.out) / "bench.csv", tacmap::bench_csv(result));
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"env_count", r.env_count},
                    {"frames", r.frames},
                    {"wall_seconds", r.wall_seconds},
                    {"total_renders_per_sec", r.total_renders_per_sec},
                    {"per_env_renders_per_sec", r.per_env_renders_per_sec},
                    {"peak_mem_bytes", r.peak_mem_bytes},
                    {"status", r.status},
                    {"first_env_checksum", r.first_env_checksum},
                    {"checksum_matches_single", r.checksum_matches_single}});
  }
  json summary{{"toolkit_version", result.toolkit_version},
               {"hardware_threads", result.hardware_threads},
               {"worker_threads", result.worker_threads},
               {"memory_source", result.memory_source},
               {"seed", cfg.seed},
               {"partial", result.partial},
               {"rows", rows}};
  try {
    const auto fit = tacmap::fit_linear_memory(result);
    summary["memory_fit"] = {{"slope_bytes_per_env", fit.slope},
                             {"intercept_bytes", fit.intercept},
                             {"r_squared", std::round(fit.r_squared * 1e4) / 1e4}};
  } catch (const tacmap::InputError& e) {
    summary["memory_fit"] = nullptr;
    summary["memory_fit_note"] = e.what();
  }
  write_text(fs::path(args.out) / "bench.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << std::endl;
  return kExitOk;
}

// --- grid -------------------------------------------------------------------

struct GridArgs {
  std::string scene;
  std::string out;
};

int cmd_grid(const GridArgs& args) {
  const tacmap::Scene scene = tacmap::load_scene(args.scene);
  const auto paths = tacmap::export_grid(scene.grid, args.out);
  json summary{{"points", scene.grid.size()},
               {"descriptor", paths.descriptor.string()},
               {"blob", paths.blob.string()}};
  std::cout << summary.dump(2) << std::endl;
  return kExitOk;
}

// --- make-press -------------------------------------------------------------

struct PressArgs {
  std::string scene;
  std::string object;
  std::string axis = "0,0,1";
  double clearance = 0.002;
  double depth = 0.001;
  int steps = 6;
  int dwell = 0;
  double dt = 0.01;
  std::string lateral = "0,0,0";
  std::string out;
};

int cmd_make_press(const PressArgs& args) {
  const tacmap::Scene scene = tacmap::load_scene(args.scene);
  tacmap::PressProfile p;
  p.object = args.object;
  const auto axis = parse_numbers(args.axis, 3, "--axis");
  const auto lateral = parse_numbers(args.lateral, 3, "--lateral");
  p.axis = tacmap::Vec3(axis[0], axis[1], axis[2]);
  p.lateral_offset = tacmap::Vec3(lateral[0], lateral[1], lateral[2]);
  p.start_clearance = args.clearance;
  p.end_depth = args.depth;
  p.steps = args.steps;
  p.dwell = args.dwell;
  p.dt = args.dt;
  const auto traj = tacmap::make_press_trajectory(scene, p);
  if (fs::path(args.out).has_parent_path()) ensure_dir(fs::path(args.out).parent_path());
  tacmap::write_trajectory(traj, args.out);
  json summary{{"frames", traj.size()}, {"out", args.out}};
  std::cout << summary.dump(2) << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tacmap: penetration-depth tactile map rendering toolkit (lengths in meters, "
               "quaternions w,x,y,z)"};
  app.set_version_flag("--version", std::string(tacmap::kVersion));
  app.require_subcommand(1);

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "Render one deform map to a TMAP file");
  render_cmd->add_option("--scene", render.scene, "Scene config JSON")->required();
  render_cmd->add_option("--sensor-pose", render.sensor_pose,
                         "Sensor pose 'w,x,y,z,tx,ty,tz' (default identity)");
  render_cmd->add_option("--object-pose", render.object_poses,
                         "Object pose 'NAME=w,x,y,z,tx,ty,tz' (repeatable; unposed objects sit "
                         "at identity)");
  render_cmd->add_option("--out", render.out, "Output TMAP path")->required();
  render_cmd->add_option("--pgm", render.pgm, "Also write a 16-bit PGM preview");
  render_cmd->add_option("--csv", render.csv, "Also write the depths as CSV");

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "Render every frame of a trajectory");
  replay_cmd->add_option("--scene", replay.scene, "Scene config JSON")->required();
  replay_cmd->add_option("--trajectory", replay.trajectory, "Trajectory JSON-lines file")->required();
  replay_cmd->add_option("--out", replay.out, "Output directory")->required();
  replay_cmd->add_option("--subsample", replay.subsample,
                         "Keep N evenly spaced frames, first and last included (0 = all)");

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "Compare two TMAP files or directories");
  compare_cmd->add_option("--a", compare.a, "TMAP file or directory (evaluated)")->required();
  compare_cmd->add_option("--b", compare.b, "TMAP file or directory (reference)")->required();
  compare_cmd->add_option("--tau", compare.tau, "Contact threshold in meters (default 5e-5)");
  compare_cmd->add_option("--scene", compare.scene,
                          "Scene config providing the grid for metric position and force errors");
  compare_cmd->add_option("--out", compare.out, "Output directory")->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Measure batched rendering throughput and memory");
  bench_cmd->add_option("--scene", bench.scene, "Scene template config JSON")->required();
  bench_cmd->add_option("--counts", bench.counts, "Ascending env counts, comma-separated")
      ->capture_default_str();
  bench_cmd->add_option("--frames", bench.frames, "Timed batches per env count")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--warmup", bench.warmup, "Untimed warmup batches")->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Pose randomization seed")->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "Output directory")->required();

  GridArgs grid;
  auto* grid_cmd = app.add_subcommand("grid", "Export the sensing grid (descriptor + f32 blob)");
  grid_cmd->add_option("--scene", grid.scene, "Scene config JSON")->required();
  grid_cmd->add_option("--out", grid.out, "Output directory")->required();

  PressArgs press;
  auto* press_cmd = app.add_subcommand("make-press", "Write a linear press trajectory");
  press_cmd->add_option("--scene", press.scene, "Scene config JSON")->required();
  press_cmd->add_option("--object", press.object, "Object name to press")->required();
  press_cmd->add_option("--axis", press.axis, "Outward surface normal 'x,y,z'")->capture_default_str();
  press_cmd->add_option("--clearance", press.clearance, "Start clearance (m)")->capture_default_str();
  press_cmd->add_option("--depth", press.depth, "Final press depth (m), <= d_max")->capture_default_str();
  press_cmd->add_option("--steps", press.steps, "Pressing frames (>= 2)")->capture_default_str();
  press_cmd->add_option("--dwell", press.dwell, "Extra frames held at final depth")->capture_default_str();
  press_cmd->add_option("--dt", press.dt, "Seconds between frames")->capture_default_str();
  press_cmd->add_option("--lateral", press.lateral, "Lateral offset 'x,y,z' (m)")->capture_default_str();
  press_cmd->add_option("--out", press.out, "Output JSON-lines path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    const auto limit = tacmap::ThreadLimit::from_env();
    if (*render_cmd) return cmd_render(render);
    if (*replay_cmd) return cmd_replay(replay);
    if (*compare_cmd) return cmd_compare(compare);
    if (*bench_cmd) return cmd_bench(bench);
    if (*grid_cmd) return cmd_grid(grid);
    if (*press_cmd) return cmd_make_press(press);
  } catch (const tacmap::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const tacmap::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const tacmap::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
