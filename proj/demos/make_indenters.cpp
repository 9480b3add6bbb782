// Writes the standard indenter set (sphere, cylinder, square prism) as OBJ
// files in millimeter units, ready for unit_scale = 0.001.
//
//   make_indenters <out_dir>

#include <filesystem>
#include <iostream>

#include "tacmap/geometry/mesh_io.hpp"
#include "tacmap/geometry/primitives.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_indenters <out_dir>\n";
    return 2;
  }
  const std::filesystem::path out(argv[1]);
  std::filesystem::create_directories(out);
  namespace prim = tacmap::primitives;
  using tacmap::Vec3;
  constexpr double mm = 1e-3;
  try {
    // Bottom of each indenter at z = 0.
    tacmap::write_obj(prim::icosphere(5 * mm, 3, Vec3(0, 0, 5 * mm)), out / "sphere.obj", mm);
    tacmap::write_obj(prim::cylinder(3 * mm, 10 * mm, 48), out / "cylinder.obj", mm);
    tacmap::write_obj(prim::box(Vec3(3 * mm, 3 * mm, 5 * mm), Vec3(0, 0, 5 * mm)),
                      out / "square.obj", mm);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 3;
  }
  std::cout << "wrote sphere.obj, cylinder.obj, square.obj to " << out << '\n';
  return 0;
}
