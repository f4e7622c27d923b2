#include "omnisynth/geometry.hpp"

#include <cmath>

namespace omnisynth::geo {

namespace {
constexpr double kPoleEps = 1e-15;
}

Vec3 spherical_to_dir(const SphericalElev& s) {
  const double c = std::cos(s.phi);
  return {c * std::cos(s.theta), c * std::sin(s.theta), std::sin(s.phi)};
}

Vec3 spherical_to_dir(const SphericalPolar& s) {
  const double sp = std::sin(s.phi);
  return {sp * std::cos(s.theta), sp * std::sin(s.theta), std::cos(s.phi)};
}

SphericalElev dir_to_spherical_elev(const Vec3& v) {
  const double n = v.norm();
  if (n == 0.0) throw std::domain_error("dir_to_spherical_elev: zero vector");
  const double rxy = std::hypot(v.x(), v.y());
  SphericalElev s;
  s.theta = rxy < kPoleEps * n ? 0.0 : std::atan2(v.y(), v.x());
  s.phi = std::atan2(v.z(), rxy);
  return s;
}

SphericalPolar dir_to_spherical_polar(const Vec3& v) {
  const double n = v.norm();
  if (n == 0.0) throw std::domain_error("dir_to_spherical_polar: zero vector");
  const double rxy = std::hypot(v.x(), v.y());
  SphericalPolar s;
  s.theta = rxy < kPoleEps * n ? 0.0 : std::atan2(v.y(), v.x());
  s.phi = std::atan2(rxy, v.z());
  return s;
}

Mat3 yaw_pitch_roll(double yaw, double pitch, double roll) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
          Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

std::pair<Vec3, Vec3> compose_pose(const Pose& pose, const Vec3& camera_ray) {
  if (camera_ray.squaredNorm() == 0.0)
    throw std::domain_error("compose_pose: zero ray");
  return {pose.position, (pose.orientation * camera_ray).normalized()};
}

PluckerRay PluckerRay::from_point_dir(const Vec3& p, const Vec3& d) {
  const double n = d.norm();
  if (n == 0.0) throw std::domain_error("PluckerRay: zero direction");
  PluckerRay r;
  r.xi = d / n;
  r.xi_bar = p.cross(r.xi);
  return r;
}

PluckerRay PluckerRay::transformed(const Pose& pose) const {
  PluckerRay out;
  out.xi = pose.orientation * xi;
  out.xi_bar = pose.orientation * xi_bar + pose.position.cross(out.xi);
  return out;
}

}  // namespace omnisynth::geo
