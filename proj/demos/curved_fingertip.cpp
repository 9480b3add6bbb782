// Spherical-cap fingertip (R = 10 mm, 60 deg half-angle) pressed 0.5 mm onto
// a flat plate. Prints depth per polar ring next to the closed form.

#include <cmath>
#include <cstdio>

#include "tacmap/tacmap.hpp"

int main() {
  using namespace tacmap;
  constexpr double mm = 1e-3;
  const double radius = 10 * mm, press = 0.5 * mm;
  const SphericalCap cap{radius, std::numbers::pi / 3.0};
  const SensingGrid grid = generate_sensing_grid(cap, GridParams{48, 32, 0.0, 2 * mm});
  SceneState scene;
  // Plate whose lower face sits `press` below the cap apex.
  scene.objects.push_back({make_body("plate", primitives::box(Vec3(20 * mm, 20 * mm, 2 * mm))),
                           RigidPose::from_translation(Vec3(0, 0, 2 * mm - press))});
  const DeformMap map = render_deform_map(grid, scene);
  std::printf("%8s %12s %12s\n", "polar", "depth[mm]", "closed[mm]");
  for (int u = 0; u < grid.rows(); u += 2) {
    const double polar = (u + 0.5) * cap.half_angle / grid.rows();
    const double closed = std::max(0.0, radius - (radius - press) / std::cos(polar));
    std::printf("%7.2f° %12.5f %12.5f\n", polar * 180.0 / std::numbers::pi, map(u, 0) / mm,
                closed / mm);
  }
  return 0;
}
