#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tacmap/io/json_fields.hpp"
#include "tacmap/render/deform_map.hpp"

namespace tacmap {
namespace {

using nlohmann::json;
using testing::data_dir;
using testing::scratch_dir;

struct Run {
  int code = -1;
  std::string out;  // stdout
  std::string err;  // stderr
};

Run run_cli(const std::string& args, const std::filesystem::path& err_file) {
  const std::string cmd = std::string("\"") + TACMAP_CLI_PATH + "\" " + args + " 2>\"" +
                          err_file.string() + "\"";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream e(err_file);
  r.err.assign(std::istreambuf_iterator<char>(e), std::istreambuf_iterator<char>());
  return r;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

const std::filesystem::path kPressScene = data_dir() / "press_fixture" / "scene.json";

TEST(Cli, RenderNoContact) {
  const auto dir = scratch_dir("cli_render_none");
  const auto r = run_cli("render --scene " + q(kPressScene) +
                             " --object-pose sphere=1,0,0,0,0,0,0.003 --out " + q(dir / "m.tmap"),
                         dir / "err.txt");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = json::parse(r.out);
  EXPECT_EQ(summary["max_depth_m"], 0.0);
  EXPECT_EQ(tmap::read(dir / "m.tmap").max_depth(), 0.0);
}

TEST(Cli, RenderPressedSphere) {
  const auto dir = scratch_dir("cli_render_press");
  const auto r = run_cli("render --scene " + q(kPressScene) +
                             " --object-pose sphere=1,0,0,0,0,0,-0.001 --out " +
                             q(dir / "m.tmap") + " --pgm " + q(dir / "m.pgm") + " --csv " +
                             q(dir / "m.csv"),
                         dir / "err.txt");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = json::parse(r.out);
  EXPECT_NEAR(summary["max_depth_m"].get<double>(), 0.001, 0.02 * 0.001);
  EXPECT_GT(summary["contact_area_m2"].get<double>(), 0.0);
  EXPECT_TRUE(std::filesystem::exists(dir / "m.pgm"));
  EXPECT_TRUE(std::filesystem::exists(dir / "m.csv"));
}

TEST(Cli, MalformedQuaternionIsInputError) {
  const auto dir = scratch_dir("cli_bad_quat");
  const auto r = run_cli("render --scene " + q(kPressScene) +
                             " --object-pose sphere=2,0,0,0,0,0,0 --out " + q(dir / "m.tmap"),
                         dir / "err.txt");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--object-pose sphere"), std::string::npos) << r.err;
  const auto s = run_cli("render --scene " + q(kPressScene) + " --sensor-pose 1,0,0 --out " +
                             q(dir / "m.tmap"),
                         dir / "err.txt");
  EXPECT_EQ(s.code, 2);
  EXPECT_NE(s.err.find("--sensor-pose"), std::string::npos) << s.err;
}

TEST(Cli, MissingSceneAndUnwritableOutput) {
  const auto dir = scratch_dir("cli_errors");
  EXPECT_EQ(run_cli("render --scene " + q(dir / "nope.json") + " --out " + q(dir / "m.tmap"),
                    dir / "err.txt")
                .code,
            2);
  EXPECT_EQ(run_cli("render --scene " + q(kPressScene) + " --out /proc/nonexistent/m.tmap",
                    dir / "err.txt")
                .code,
            3);
}

TEST(Cli, UnknownFlagAndHelp) {
  const auto dir = scratch_dir("cli_flags");
  const auto bad = run_cli("render --scene x --out y --bogus", dir / "err.txt");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("bogus"), std::string::npos) << bad.err;
  for (const char* sub : {"render", "replay", "compare", "bench", "grid", "make-press"}) {
    const auto help = run_cli(std::string(sub) + " --help", dir / "err.txt");
    EXPECT_EQ(help.code, 0) << sub;
    EXPECT_NE(help.out.find("--out"), std::string::npos) << sub;
    EXPECT_NE(help.out.find("--scene"), std::string::npos) << sub;
  }
  EXPECT_EQ(run_cli("", dir / "err.txt").code, 2);
}

TEST(Cli, ReplayFixtureAndSelfCompare) {
  const auto dir = scratch_dir("cli_replay");
  const auto r = run_cli("replay --scene " + q(kPressScene) + " --trajectory " +
                             q(data_dir() / "press_fixture" / "press.jsonl") + " --out " +
                             q(dir / "frames"),
                         dir / "err.txt");
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t tmaps = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "frames")) {
    tmaps += e.path().extension() == ".tmap" ? 1 : 0;
  }
  EXPECT_EQ(tmaps, 6u);
  EXPECT_TRUE(std::filesystem::exists(dir / "frames" / "manifest.json"));

  const auto c = run_cli("compare --a " + q(dir / "frames") + " --b " + q(dir / "frames") +
                             " --scene " + q(kPressScene) + " --out " + q(dir / "cmp"),
                         dir / "err.txt");
  ASSERT_EQ(c.code, 0) << c.err;
  const auto summary = json::parse(c.out);
  EXPECT_EQ(summary["iou"], 1.0);
  EXPECT_EQ(summary["depth_error"], 0.0);
  EXPECT_EQ(summary["position_error_m"], 0.0);
  EXPECT_EQ(summary["force_l2_n"], 0.0);
  std::ifstream csv(dir / "cmp" / "compare.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "frame,iou,depth_error,position_error_m,force_l2_N");
}

TEST(Cli, CompareFixtures) {
  const auto dir = scratch_dir("cli_compare");
  DeformMap zeros(2, 3, 0.002), a(2, 3, 0.002), b(2, 3, 0.002);
  a(0, 0) = a(0, 1) = 0.001;
  b(0, 1) = b(0, 2) = 0.001;
  tmap::write(zeros, dir / "zeros.tmap");
  tmap::write(a, dir / "a.tmap");
  tmap::write(b, dir / "b.tmap");
  tmap::write(DeformMap(3, 2, 0.002), dir / "other.tmap");

  const auto z = run_cli("compare --a " + q(dir / "zeros.tmap") + " --b " + q(dir / "zeros.tmap") +
                             " --out " + q(dir / "z"),
                         dir / "err.txt");
  ASSERT_EQ(z.code, 0) << z.err;
  EXPECT_EQ(json::parse(z.out)["iou"], 1.0);
  EXPECT_TRUE(json::parse(z.out)["depth_error"].is_null());

  const auto third = run_cli("compare --a " + q(dir / "a.tmap") + " --b " + q(dir / "b.tmap") +
                                 " --out " + q(dir / "t"),
                             dir / "err.txt");
  ASSERT_EQ(third.code, 0) << third.err;
  EXPECT_NEAR(json::parse(third.out)["iou"].get<double>(), 1.0 / 3.0, 1e-12);

  const auto mismatch = run_cli("compare --a " + q(dir / "a.tmap") + " --b " +
                                    q(dir / "other.tmap") + " --out " + q(dir / "m"),
                                dir / "err.txt");
  EXPECT_EQ(mismatch.code, 2);
}

TEST(Cli, BenchTwoCounts) {
  const auto dir = scratch_dir("cli_bench");
  const auto r = run_cli("bench --scene " + q(kPressScene) +
                             " --counts 16,64 --frames 1 --warmup 0 --out " + q(dir),
                         dir / "err.txt");
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream csv(dir / "bench.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 3u);  // header + 2 rows
  const auto doc = json::parse(std::ifstream(dir / "bench.json"));
  EXPECT_EQ(doc["rows"].size(), 2u);
  EXPECT_TRUE(doc["memory_fit"].is_null());
  EXPECT_EQ(run_cli("bench --scene " + q(kPressScene) + " --counts 64,16 --out " + q(dir),
                    dir / "err.txt")
                .code,
            2);
  EXPECT_EQ(run_cli("bench --scene " + q(kPressScene) + " --counts 16,x --out " + q(dir),
                    dir / "err.txt")
                .code,
            2);
}

TEST(Cli, GridExport) {
  const auto dir = scratch_dir("cli_grid");
  const auto r = run_cli("grid --scene " + q(kPressScene) + " --out " + q(dir), dir / "err.txt");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["points"], 4096);
  EXPECT_EQ(std::filesystem::file_size(dir / "grid.bin"), 4096u * 7u * 4u);
  const auto desc = json::parse(std::ifstream(dir / "grid.json"));
  EXPECT_EQ(desc["H"], 64);
}

TEST(Cli, MakePressMatchesFixture) {
  const auto dir = scratch_dir("cli_press");
  const auto r = run_cli("make-press --scene " + q(kPressScene) +
                             " --object sphere --clearance 0.001 --depth 0.001 --steps 6 --out " +
                             q(dir / "p.jsonl"),
                         dir / "err.txt");
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream made(dir / "p.jsonl"), fixture(data_dir() / "press_fixture" / "press.jsonl");
  const std::string a((std::istreambuf_iterator<char>(made)), std::istreambuf_iterator<char>());
  const std::string b((std::istreambuf_iterator<char>(fixture)), std::istreambuf_iterator<char>());
  EXPECT_EQ(a, b);
  EXPECT_EQ(run_cli("make-press --scene " + q(kPressScene) +
                        " --object sphere --depth 0.005 --out " + q(dir / "x.jsonl"),
                    dir / "err.txt")
                .code,
            2);
}

}  // namespace
}  // namespace tacmap
