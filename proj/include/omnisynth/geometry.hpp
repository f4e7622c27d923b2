#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

namespace omnisynth::geo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Azimuth/elevation pair: phi measured from the horizontal plane,
// (theta=0, phi=0) is the +X axis. Used by panoramic models.
struct SphericalElev {
  double theta = 0.0;  // [-pi, pi]
  double phi = 0.0;    // [-pi/2, pi/2]
};

// Azimuth/polar pair: phi measured from the +Z axis, phi=0 is the optical
// axis. Used by revolution-symmetric lens and mirror models. Kept as a
// separate type from SphericalElev so the two phi conventions cannot be
// mixed silently.
struct SphericalPolar {
  double theta = 0.0;  // [-pi, pi]
  double phi = 0.0;    // [0, pi]
};

Vec3 spherical_to_dir(const SphericalElev& s);
Vec3 spherical_to_dir(const SphericalPolar& s);
SphericalElev dir_to_spherical_elev(const Vec3& v);
SphericalPolar dir_to_spherical_polar(const Vec3& v);

// The engine-export frame is left-handed; ours is right-handed with Z up
// and X forward. The two frames differ by a Y flip, which is an involution.
inline Vec3 ue4_to_world(const Vec3& v) { return {v.x(), -v.y(), v.z()}; }
inline Vec3 world_to_ue4(const Vec3& v) { return {v.x(), -v.y(), v.z()}; }

// Camera-to-world: R = Rz(yaw) * Ry(pitch) * Rx(roll). Angles in radians.
Mat3 yaw_pitch_roll(double yaw, double pitch, double roll);

struct Pose {
  Vec3 position = Vec3::Zero();
  Mat3 orientation = Mat3::Identity();  // camera-to-world
};

// Rotates a camera-frame ray into the world and pairs it with the camera
// position. The returned direction is normalized.
std::pair<Vec3, Vec3> compose_pose(const Pose& pose, const Vec3& camera_ray);

// Oriented 3D line as (direction, moment) with moment = point x direction.
// Any point p on the line satisfies p x xi == xi_bar.
struct PluckerRay {
  Vec3 xi = Vec3::UnitZ();       // unit direction
  Vec3 xi_bar = Vec3::Zero();    // moment about the frame origin

  static PluckerRay from_point_dir(const Vec3& p, const Vec3& d);

  double side_constraint() const { return xi.dot(xi_bar); }
  double distance_to_point(const Vec3& p) const { return (p.cross(xi) - xi_bar).norm(); }
  Vec3 closest_point_to_origin() const { return xi.cross(xi_bar); }

  // Rigid transform of the line: direction rotates, the moment picks up the
  // translation term t x (R xi).
  PluckerRay transformed(const Pose& pose) const;
};

}  // namespace omnisynth::geo
