#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>

#include "tacmap/error.hpp"
#include "tacmap/geometry/mesh.hpp"

namespace tacmap {

// |n . d| below this (unit normal, unit direction) counts as parallel.
inline constexpr double kParallelEpsilon = 1e-9;
// Hits this far behind the origin are still accepted and reported at t = 0.
inline constexpr double kHitTolerance = 1e-9;

enum class FacingFilter { any, back_only };
enum class Facing { front, back };

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
  double t_max = std::numeric_limits<double>::infinity();
  double t_min = -kHitTolerance;

  // Validating constructor for rays coming from outside the library.
  static Ray make(const Vec3& origin, const Vec3& direction, double t_max,
                  double t_min = -kHitTolerance) {
    if (!origin.allFinite()) throw InputError("ray origin must be finite");
    if (std::abs(direction.norm() - 1.0) > 1e-9) throw InputError("ray direction must be unit length");
    if (!(t_max > 0.0)) throw InputError("ray t_max must be positive");
    if (!(t_min <= t_max)) throw InputError("ray t_min must not exceed t_max");
    return Ray{origin, direction, t_max, t_min};
  }
};

struct RayHit {
  double t = 0.0;  // clamped to >= 0
  std::uint32_t triangle = 0;
  Vec3 point = Vec3::Zero();
  Facing facing = Facing::front;
};

// Unclamped candidate; ordering is (t, triangle id).
struct HitCandidate {
  double t = std::numeric_limits<double>::infinity();
  std::uint32_t triangle = std::numeric_limits<std::uint32_t>::max();
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;

  bool valid() const { return triangle != std::numeric_limits<std::uint32_t>::max(); }
  bool better_than(const HitCandidate& other) const {
    return t < other.t || (t == other.t && triangle < other.triangle);
  }
};

inline Facing facing_of(const Vec3& unit_normal, const Vec3& direction) {
  return unit_normal.dot(direction) > 0.0 ? Facing::back : Facing::front;
}

// Precomputed shear/permutation for the watertight ray-triangle test
// (Woop, Benthin, Wald 2013). Edges shared by two triangles are reported as
// hits on both, so rays through a shared edge or vertex never fall through.
class WatertightRay {
 public:
  explicit WatertightRay(const Ray& ray) : ray_(ray) {
    const Vec3 abs_dir = ray.direction.cwiseAbs();
    kz_ = abs_dir.x() > abs_dir.y() ? (abs_dir.x() > abs_dir.z() ? 0 : 2)
                                    : (abs_dir.y() > abs_dir.z() ? 1 : 2);
    kx_ = (kz_ + 1) % 3;
    ky_ = (kx_ + 1) % 3;
    if (ray.direction[kz_] < 0.0) std::swap(kx_, ky_);
    sx_ = ray.direction[kx_] / ray.direction[kz_];
    sy_ = ray.direction[ky_] / ray.direction[kz_];
    sz_ = 1.0 / ray.direction[kz_];
  }

  const Ray& ray() const { return ray_; }

  // Returns (t, barycentrics) when the ray crosses the triangle with
  // t in [t_min, t_max]. Parallel triangles (per kParallelEpsilon on the
  // unit normal) are rejected.
  std::optional<HitCandidate> intersect(const Vec3& v0, const Vec3& v1, const Vec3& v2,
                                        const Vec3& unit_normal, std::uint32_t id,
                                        double t_min, double t_max) const {
    if (std::abs(unit_normal.dot(ray_.direction)) < kParallelEpsilon) return std::nullopt;

    const Vec3 a = v0 - ray_.origin;
    const Vec3 b = v1 - ray_.origin;
    const Vec3 c = v2 - ray_.origin;
    const double ax = a[kx_] - sx_ * a[kz_], ay = a[ky_] - sy_ * a[kz_];
    const double bx = b[kx_] - sx_ * b[kz_], by = b[ky_] - sy_ * b[kz_];
    const double cx = c[kx_] - sx_ * c[kz_], cy = c[ky_] - sy_ * c[kz_];

    double u = cx * by - cy * bx;
    double v = ax * cy - ay * cx;
    double w = bx * ay - by * ax;
    if (u == 0.0 || v == 0.0 || w == 0.0) {
      using LD = long double;
      u = static_cast<double>(LD(cx) * LD(by) - LD(cy) * LD(bx));
      v = static_cast<double>(LD(ax) * LD(cy) - LD(ay) * LD(cx));
      w = static_cast<double>(LD(bx) * LD(ay) - LD(by) * LD(ax));
    }
    if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return std::nullopt;

    const double det = u + v + w;
    if (det == 0.0) return std::nullopt;

    const double az = sz_ * a[kz_], bz = sz_ * b[kz_], cz = sz_ * c[kz_];
    const double t = (u * az + v * bz + w * cz) / det;
    if (!(t >= t_min && t <= t_max)) return std::nullopt;

    HitCandidate hit;
    hit.t = t;
    hit.triangle = id;
    hit.b0 = u / det;
    hit.b1 = v / det;
    hit.b2 = w / det;
    return hit;
  }

 private:
  Ray ray_;
  int kx_ = 0, ky_ = 1, kz_ = 2;
  double sx_ = 0.0, sy_ = 0.0, sz_ = 1.0;
};

inline bool passes_filter(const Vec3& unit_normal, const Vec3& direction, FacingFilter filter) {
  return filter == FacingFilter::any || facing_of(unit_normal, direction) == Facing::back;
}

inline RayHit finalize_hit(const TriangleMesh& mesh, const Ray& ray, const HitCandidate& c) {
  RayHit hit;
  hit.t = std::max(c.t, 0.0);
  hit.triangle = c.triangle;
  hit.point = c.b0 * mesh.vertex(c.triangle, 0) + c.b1 * mesh.vertex(c.triangle, 1) +
              c.b2 * mesh.vertex(c.triangle, 2);
  hit.facing = facing_of(mesh.normals()[c.triangle], ray.direction);
  return hit;
}

}  // namespace tacmap
