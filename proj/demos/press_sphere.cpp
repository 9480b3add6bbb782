// Presses a 5 mm sphere 1 mm into a flat 20 x 20 mm pad and prints the
// deform map as ASCII art along with the derived contact signals.

#include <cstdio>
#include <iostream>

#include "tacmap/tacmap.hpp"

int main() {
  using namespace tacmap;
  constexpr double mm = 1e-3;
  const SensingGrid grid =
      generate_sensing_grid(FlatRect{20 * mm, 20 * mm}, GridParams{32, 32, 0.0, 2 * mm});
  SceneState scene;
  scene.objects.push_back({make_body("ball", primitives::icosphere(5 * mm, 4)),
                           RigidPose::from_translation(Vec3(0, 0, 4 * mm))});
  const DeformMap map = render_deform_map(grid, scene);

  const char* shades = " .:-=+*#%@";
  for (int u = 0; u < map.rows(); ++u) {
    for (int v = 0; v < map.cols(); ++v) {
      const int level = static_cast<int>(9.0 * map(u, v) / (1.0 * mm) + 0.5);
      std::putchar(shades[level < 0 ? 0 : (level > 9 ? 9 : level)]);
      std::putchar(' ');
    }
    std::putchar('\n');
  }
  const ContactSignals s = compute_signals(map, grid);
  std::printf("max depth %.4f mm, contact area %.3f mm^2, |F| %.4f N\n", s.max_depth / mm,
              s.contact_area / (mm * mm), s.net_force.norm());
  return 0;
}
