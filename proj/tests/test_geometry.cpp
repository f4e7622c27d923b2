#include "omnisynth/geometry.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace omnisynth::geo;

namespace {

std::mt19937_64 rng(17);

Vec3 random_unit() {
  std::normal_distribution<double> n;
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

Vec3 random_point(double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST(Spherical, ElevationAxes) {
  EXPECT_LT((spherical_to_dir(SphericalElev{0, 0}) - Vec3(1, 0, 0)).norm(), 1e-15);
  EXPECT_LT((spherical_to_dir(SphericalElev{kPi / 2, 0}) - Vec3(0, 1, 0)).norm(), 1e-15);
  EXPECT_LT((spherical_to_dir(SphericalElev{0, kPi / 2}) - Vec3(0, 0, 1)).norm(), 1e-15);
  EXPECT_LT((spherical_to_dir(SphericalElev{0, -kPi / 2}) - Vec3(0, 0, -1)).norm(), 1e-15);
}

TEST(Spherical, PolarAxes) {
  EXPECT_LT((spherical_to_dir(SphericalPolar{0, 0}) - Vec3(0, 0, 1)).norm(), 1e-15);
  EXPECT_LT((spherical_to_dir(SphericalPolar{0, kPi / 2}) - Vec3(1, 0, 0)).norm(), 1e-15);
  EXPECT_LT((spherical_to_dir(SphericalPolar{kPi / 2, kPi / 2}) - Vec3(0, 1, 0)).norm(), 1e-15);
  EXPECT_LT((spherical_to_dir(SphericalPolar{0, kPi}) - Vec3(0, 0, -1)).norm(), 1e-15);
}

TEST(Spherical, RoundTripElevation) {
  for (int k = 0; k < 1000; ++k) {
    const Vec3 d = random_unit();
    const Vec3 back = spherical_to_dir(dir_to_spherical_elev(d));
    EXPECT_LT((back - d).norm(), 1e-12);
  }
}

TEST(Spherical, RoundTripPolar) {
  for (int k = 0; k < 1000; ++k) {
    const Vec3 d = random_unit();
    const Vec3 back = spherical_to_dir(dir_to_spherical_polar(d));
    EXPECT_LT((back - d).norm(), 1e-12);
  }
}

TEST(Spherical, ConventionsAgreeOnTheta) {
  for (int k = 0; k < 200; ++k) {
    const Vec3 d = random_unit();
    EXPECT_DOUBLE_EQ(dir_to_spherical_elev(d).theta, dir_to_spherical_polar(d).theta);
    EXPECT_NEAR(dir_to_spherical_elev(d).phi + dir_to_spherical_polar(d).phi,
                kPi / 2, 1e-12);
  }
}

TEST(Spherical, PoleAzimuthIsZero) {
  EXPECT_EQ(dir_to_spherical_elev(Vec3(0, 0, 1)).theta, 0.0);
  EXPECT_EQ(dir_to_spherical_elev(Vec3(0, 0, -1)).theta, 0.0);
  EXPECT_EQ(dir_to_spherical_polar(Vec3(0, 0, 1)).theta, 0.0);
  EXPECT_EQ(dir_to_spherical_polar(Vec3(0, 0, -1)).theta, 0.0);
  EXPECT_THROW(dir_to_spherical_elev(Vec3::Zero()), std::domain_error);
}

TEST(Frames, EngineConversionIsAnInvolution) {
  for (int k = 0; k < 100; ++k) {
    const Vec3 v = random_point(10.0);
    EXPECT_EQ(world_to_ue4(ue4_to_world(v)), v);
    EXPECT_EQ(ue4_to_world(v).y(), -v.y());
    EXPECT_EQ(ue4_to_world(v).x(), v.x());
    EXPECT_EQ(ue4_to_world(v).z(), v.z());
  }
}

TEST(Rotation, YawPitchRollAxes) {
  // Positive yaw turns +X toward +Y; positive pitch dips +X toward -Z.
  const Mat3 yaw90 = yaw_pitch_roll(kPi / 2, 0, 0);
  EXPECT_LT((yaw90 * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm(), 1e-15);
  const Mat3 pitch90 = yaw_pitch_roll(0, kPi / 2, 0);
  EXPECT_LT((pitch90 * Vec3(1, 0, 0) - Vec3(0, 0, -1)).norm(), 1e-15);
  const Mat3 roll90 = yaw_pitch_roll(0, 0, kPi / 2);
  EXPECT_LT((roll90 * Vec3(0, 1, 0) - Vec3(0, 0, 1)).norm(), 1e-15);
}

TEST(Rotation, ComposesInYawPitchRollOrder) {
  const double y = 0.3, p = -0.7, r = 1.1;
  const Mat3 expect = (Eigen::AngleAxisd(y, Vec3::UnitZ()) *
                       Eigen::AngleAxisd(p, Vec3::UnitY()) *
                       Eigen::AngleAxisd(r, Vec3::UnitX()))
                          .toRotationMatrix();
  EXPECT_LT((yaw_pitch_roll(y, p, r) - expect).norm(), 1e-15);
}

TEST(Rotation, IsOrthonormal) {
  for (int k = 0; k < 100; ++k) {
    std::uniform_real_distribution<double> u(-kPi, kPi);
    const Mat3 m = yaw_pitch_roll(u(rng), u(rng), u(rng));
    EXPECT_LT((m * m.transpose() - Mat3::Identity()).norm(), 1e-14);
    EXPECT_NEAR(m.determinant(), 1.0, 1e-14);
  }
}

TEST(Pose, ComposeRotatesAndNormalizes) {
  Pose pose;
  pose.position = Vec3(1, 2, 3);
  pose.orientation = yaw_pitch_roll(kPi / 2, 0, 0);
  const auto [origin, dir] = compose_pose(pose, Vec3(2, 0, 0));
  EXPECT_EQ(origin, pose.position);
  EXPECT_LT((dir - Vec3(0, 1, 0)).norm(), 1e-15);
  EXPECT_NEAR(dir.norm(), 1.0, 1e-15);
  EXPECT_THROW(compose_pose(pose, Vec3::Zero()), std::domain_error);
}

TEST(Plucker, MomentIsPerpendicularToDirection) {
  for (int k = 0; k < 500; ++k) {
    const auto ray = PluckerRay::from_point_dir(random_point(), random_unit());
    EXPECT_LT(std::abs(ray.side_constraint()), 1e-14);
    EXPECT_NEAR(ray.xi.norm(), 1.0, 1e-15);
  }
}

TEST(Plucker, PointsOnLineHaveZeroResidual) {
  for (int k = 0; k < 500; ++k) {
    const Vec3 p = random_point();
    const Vec3 d = random_unit();
    const auto ray = PluckerRay::from_point_dir(p, d);
    std::uniform_real_distribution<double> u(-5, 5);
    const Vec3 q = p + u(rng) * d;
    EXPECT_LT(ray.distance_to_point(q), 1e-13);
    // A point pushed off the line by h sits at distance h.
    Vec3 n = d.cross(random_unit());
    if (n.norm() < 1e-6) continue;
    n.normalize();
    EXPECT_NEAR(ray.distance_to_point(q + 0.25 * n), 0.25, 1e-12);
  }
}

TEST(Plucker, ClosestPointToOrigin) {
  const auto ray = PluckerRay::from_point_dir(Vec3(1, 0, -2), Vec3(0, 0, 5));
  EXPECT_LT((ray.closest_point_to_origin() - Vec3(1, 0, 0)).norm(), 1e-15);
}

TEST(Plucker, RigidTransformMapsTheLine) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int k = 0; k < 200; ++k) {
    const Vec3 p = random_point();
    const Vec3 d = random_unit();
    const auto ray = PluckerRay::from_point_dir(p, d);
    Pose pose;
    pose.position = random_point();
    pose.orientation = yaw_pitch_roll(u(rng), u(rng), u(rng));
    const auto moved = ray.transformed(pose);
    // Transformed points must lie on the transformed line.
    for (double t : {-2.0, 0.0, 3.5}) {
      const Vec3 q = pose.orientation * (p + t * d) + pose.position;
      EXPECT_LT(moved.distance_to_point(q), 1e-12);
    }
    EXPECT_LT(std::abs(moved.side_constraint()), 1e-12);
    // transformed() with the inverse pose undoes the transform.
    Pose inv;
    inv.orientation = pose.orientation.transpose();
    inv.position = -(pose.orientation.transpose() * pose.position);
    const auto back = moved.transformed(inv);
    EXPECT_LT((back.xi - ray.xi).norm(), 1e-13);
    EXPECT_LT((back.xi_bar - ray.xi_bar).norm(), 1e-12);
  }
}
