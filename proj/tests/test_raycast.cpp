#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tacmap/geometry/bvh.hpp"
#include "tacmap/geometry/primitives.hpp"

namespace tacmap {
namespace {

TriangleMesh unit_triangle_at(double z) {
  return TriangleMesh::build({Vec3(-1, -1, z), Vec3(1, -1, z), Vec3(0, 1, z)}, {{0, 1, 2}}).mesh;
}

TEST(Raycast, HitAtUnitDistance) {
  const auto mesh = unit_triangle_at(1.0);
  const auto bvh = build_bvh(mesh);
  const auto hit = raycast_first_hit(bvh, mesh, Ray::make(Vec3::Zero(), Vec3::UnitZ(), 10.0));
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t, 1.0);
  EXPECT_EQ(hit->triangle, 0u);
  EXPECT_LT((hit->point - Vec3(0, 0, 1)).norm(), 1e-15);
  // Normal is +z and the ray travels +z: leaving through the back.
  EXPECT_EQ(hit->facing, Facing::back);
  EXPECT_TRUE(raycast_first_hit(bvh, mesh, Ray::make(Vec3::Zero(), Vec3::UnitZ(), 10.0),
                                FacingFilter::back_only));
  EXPECT_FALSE(raycast_first_hit(bvh, mesh, Ray::make(Vec3(0, 0, 2), -Vec3::UnitZ(), 10.0),
                                 FacingFilter::back_only));
}

TEST(Raycast, ParallelRayMisses) {
  const auto mesh = unit_triangle_at(0.0);
  const auto bvh = build_bvh(mesh);
  EXPECT_FALSE(raycast_first_hit(bvh, mesh, Ray::make(Vec3(-5, 0, 0), Vec3::UnitX(), 10.0)));
}

TEST(Raycast, OutsideRangeMisses) {
  const auto mesh = unit_triangle_at(1.0);
  const auto bvh = build_bvh(mesh);
  EXPECT_FALSE(raycast_first_hit(bvh, mesh, Ray::make(Vec3::Zero(), Vec3::UnitZ(), 0.5)));
  EXPECT_FALSE(raycast_first_hit(bvh, mesh, Ray::make(Vec3(0, 0, 2), Vec3::UnitZ(), 10.0)));
  EXPECT_FALSE(raycast_first_hit(bvh, mesh, Ray::make(Vec3(5, 0, 0), Vec3::UnitZ(), 10.0)));
}

TEST(Raycast, OriginOnSurfaceReportsZero) {
  const auto mesh = unit_triangle_at(0.0);
  const auto bvh = build_bvh(mesh);
  const auto hit = raycast_first_hit(bvh, mesh, Ray::make(Vec3::Zero(), Vec3::UnitZ(), 1.0));
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->t, 0.0);
}

TEST(Raycast, RejectsBadRays) {
  EXPECT_THROW(Ray::make(Vec3::Zero(), Vec3(0, 0, 2), 1.0), InputError);
  EXPECT_THROW(Ray::make(Vec3::Zero(), Vec3::UnitZ(), 0.0), InputError);
  EXPECT_THROW(Ray::make(Vec3(std::nan(""), 0, 0), Vec3::UnitZ(), 1.0), InputError);
}

TEST(Raycast, MatchesBruteForceOnRandomSoup) {
  const auto mesh = testing::random_triangle_soup(200, 2024);
  const auto bvh = build_bvh(mesh);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 origin(coord(rng), coord(rng), coord(rng));
    const Vec3 dir = testing::random_unit(rng);
    for (auto filter : {FacingFilter::any, FacingFilter::back_only}) {
      const Ray ray = Ray::make(origin, dir, 5.0);
      const auto got = bvh.closest(mesh, ray, filter);
      const auto want = testing::brute_force_first_hit(mesh, ray, filter);
      ASSERT_EQ(got.has_value(), want.has_value()) << "ray " << i;
      if (got) {
        ++hits;
        EXPECT_EQ(got->triangle, want->triangle);
        EXPECT_NEAR(got->t, want->t, 1e-9);
      }
    }
  }
  EXPECT_GT(hits, 200);
}

TEST(Raycast, InteriorBarycentricTargetsAreHit) {
  const auto mesh = testing::random_triangle_soup(200, 5);
  const auto bvh = build_bvh(mesh);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u01(0.05, 0.9);
  for (std::uint32_t tri = 0; tri < mesh.num_triangles(); ++tri) {
    double a = u01(rng), b = u01(rng);
    if (a + b > 0.95) {
      a *= 0.5;
      b *= 0.5;
    }
    const Vec3 target = (1 - a - b) * mesh.vertex(tri, 0) + a * mesh.vertex(tri, 1) +
                        b * mesh.vertex(tri, 2);
    const Vec3 origin = target + 3.0 * mesh.normals()[tri];
    const Ray ray = Ray::make(origin, -mesh.normals()[tri], 10.0);
    const auto hit = raycast_first_hit(bvh, mesh, ray);
    ASSERT_TRUE(hit);
    // Something is hit no later than the target triangle.
    EXPECT_LE(hit->t, 3.0 + 1e-9);
    const auto on_target =
        WatertightRay(ray).intersect(mesh.vertex(tri, 0), mesh.vertex(tri, 1), mesh.vertex(tri, 2),
                                     mesh.normals()[tri], tri, ray.t_min, ray.t_max);
    ASSERT_TRUE(on_target);
    EXPECT_NEAR(on_target->t, 3.0, 1e-12);
  }
}

TEST(Raycast, SharedEdgeIsWatertight) {
  // Two triangles sharing the diagonal of a unit square; rays along the
  // diagonal must hit one of them.
  const auto mesh =
      TriangleMesh::build({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)},
                          {{0, 1, 2}, {0, 2, 3}})
          .mesh;
  const auto bvh = build_bvh(mesh);
  for (int i = 1; i < 100; ++i) {
    const double s = i / 100.0;
    const auto hit = raycast_first_hit(bvh, mesh, Ray::make(Vec3(s, s, -1), Vec3::UnitZ(), 2.0));
    ASSERT_TRUE(hit) << s;
    EXPECT_EQ(hit->triangle, 0u);  // tie goes to the lower id
  }
}

TEST(Raycast, TransformConsistency) {
  const auto mesh = primitives::icosphere(0.005, 3);
  const auto bvh = build_bvh(mesh);
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    const RigidPose pose(testing::random_rotation(rng), 0.01 * testing::random_unit(rng));
    const auto moved = mesh.transformed(pose);
    const auto moved_bvh = build_bvh(moved);
    const Vec3 origin = pose.apply_point(0.02 * testing::random_unit(rng));
    const Vec3 toward = (pose.translation() + 0.002 * testing::random_unit(rng) - origin).normalized();
    const Ray world = Ray::make(origin, toward, 1.0);
    const RigidPose inv = pose.inverse();
    const Ray local = Ray::make(inv.apply_point(origin), inv.apply_vector(toward), 1.0);
    const auto a = raycast_first_hit(moved_bvh, moved, world);
    const auto b = raycast_first_hit(bvh, mesh, local);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) EXPECT_NEAR(a->t, b->t, 1e-12);
  }
}

}  // namespace
}  // namespace tacmap
