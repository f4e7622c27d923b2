#include "omnisynth/noncentral.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "omnisynth/parallel.hpp"

namespace omnisynth::nc {

using geo::kPi;
using geo::PluckerRay;

ConicalCat conical_from_apex(double z_a, double tau, double beta_max) {
  const double s = std::sin(tau);
  return {2.0 * z_a * s * s, z_a * std::sin(2.0 * tau), tau, beta_max};
}

Vec3 nc_panorama_center(double u, const ImageGrid& grid,
                        const NCPanorama& model) {
  const double theta = (2.0 * u / grid.u_max - 1.0) * kPi;
  const double ct = std::cos(theta), st = std::sin(theta);
  return model.center + model.r_c * Vec3(ct * std::cos(model.tilt), st,
                                         ct * std::sin(model.tilt));
}

PluckerRay nc_panorama_ray(double u, double v, const ImageGrid& grid,
                           const NCPanorama& model) {
  const double theta = (2.0 * u / grid.u_max - 1.0) * kPi;
  const double phi = (0.5 - v / grid.v_max) * kPi;
  const Vec3 dir = geo::spherical_to_dir(geo::SphericalElev{theta, phi});
  return PluckerRay::from_point_dir(nc_panorama_center(u, grid, model), dir);
}

namespace {

// Azimuth and radius of a pixel relative to the disc center; the image is
// laid out as (u, v) = (u0 + r cos(theta), v0 - r sin(theta)).
struct DiscPixel {
  double r_hat = 0.0;
  double theta = 0.0;
};

DiscPixel disc_pixel(double u, double v, const ImageGrid& grid) {
  const geo::Vec2 c = grid.center();
  const double du = u - c.x(), dv = c.y() - v;
  return {std::hypot(du, dv), std::atan2(dv, du)};
}

// Pixel radius in the tangent space of the host camera: the disc edge maps
// to tan(beta_max).
double radial_to_tan(double r_hat, const ImageGrid& grid, double beta_max) {
  return r_hat / grid.r_hat_max() * std::tan(beta_max);
}

struct ConicalParts {
  double z_r = 0.0, phi = 0.0;
};

std::optional<ConicalParts> conical_parts(double r_n, const ConicalCat& m) {
  const double t2 = std::tan(2.0 * m.tau);
  const double denom = t2 - r_n;
  if (std::abs(denom) < 1e-12) return std::nullopt;  // grazing ring
  const double cot = (1.0 + r_n * t2) / denom;
  return ConicalParts{m.z_c + m.r_c * cot, std::atan2(1.0, cot)};
}

ConicalRay conical_polar_ray(double r_n, double theta, const ConicalParts& p) {
  const double sp = std::sin(p.phi), cp = std::cos(p.phi);
  const Vec3 dir(sp * std::cos(theta), sp * std::sin(theta), cp);
  return {PluckerRay::from_point_dir(Vec3(0, 0, p.z_r), dir), p.z_r};
}

struct SphericalParts {
  double gamma = 0.0, delta = 0.0, eps = 0.0, zeta = 0.0;
  double z_s = 0.0, z_r = 0.0;
};

// Closed-form single-reflection solution for the camera ray (x, y, 1);
// radially symmetric, so ring-level quantities depend only on r_n.
std::optional<SphericalParts> spherical_parts(double r_n,
                                              const SphericalCat& m) {
  SphericalParts p;
  p.z_s = m.z_m + m.r_s;
  const double zr = p.z_s / m.r_s;  // center height in mirror radii
  const double z2 = zr * zr;
  const double r2 = r_n * r_n;
  const double rho2 = r2 + 1.0;
  p.gamma = (-r2 * z2 + rho2) * z2;  // sign matches the hit discriminant
  if (p.gamma < 0.0) return std::nullopt;
  const double sg = std::sqrt(p.gamma);
  p.delta = 2 * r2 * z2 * z2 - 2 * sg * z2 - 3 * rho2 * z2 + rho2;
  p.eps = (1.0 - r2) * z2 + 2 * sg + rho2;
  p.zeta = 2 * r2 * z2 * z2 - rho2 * z2 - 2 * sg * (-r2 * z2 + rho2) - rho2;
  p.z_r = p.z_s * (p.delta + p.eps) / p.delta;
  return p;
}

PluckerRay spherical_polar_ray(double r_n, double theta,
                               const SphericalParts& p) {
  const double x = r_n * std::cos(theta);
  const double y = r_n * std::sin(theta);
  // Reflected line: direction opposes (x*delta, y*delta, -zeta); its moment
  // about the mirror center re-expresses about the camera origin below.
  const Vec3 xi(x * p.delta, y * p.delta, -p.zeta);
  const Vec3 m_center(p.eps * y * p.z_s, -p.eps * x * p.z_s, 0.0);
  const double n = xi.norm();
  const Vec3 d = -xi / n;
  const Vec3 m = m_center / n + p.z_s * Vec3::UnitZ().cross(d);
  return {d, m};
}

}  // namespace

std::optional<ConicalRay> conical_ray(double u, double v,
                                      const ImageGrid& grid,
                                      const ConicalCat& model) {
  const DiscPixel px = disc_pixel(u, v, grid);
  if (px.r_hat > grid.r_hat_max()) return std::nullopt;
  const auto parts =
      conical_parts(radial_to_tan(px.r_hat, grid, model.beta_max), model);
  if (!parts) return std::nullopt;
  return conical_polar_ray(radial_to_tan(px.r_hat, grid, model.beta_max),
                           px.theta, *parts);
}

std::optional<PluckerRay> spherical_cat_ray(double u, double v,
                                            const ImageGrid& grid,
                                            const SphericalCat& model,
                                            SphericalRayInfo* info) {
  const DiscPixel px = disc_pixel(u, v, grid);
  if (px.r_hat > grid.r_hat_max()) return std::nullopt;
  const double r_n = radial_to_tan(px.r_hat, grid, model.beta_max);
  const auto parts = spherical_parts(r_n, model);
  if (!parts) return std::nullopt;
  if (info)
    *info = {parts->gamma, parts->delta, parts->eps, parts->zeta, parts->z_r};
  return spherical_polar_ray(r_n, px.theta, *parts);
}

namespace {

int ring_of(double r_hat) { return int(std::lround(r_hat)); }

// Ring radius in tan space, evaluated at the integer ring index so that all
// pixels of a ring share the exact same radial solution.
double ring_tan_radius(int ring, const ImageGrid& grid, double beta_max) {
  return radial_to_tan(double(ring), grid, beta_max);
}

struct RingModel {
  bool valid = false;
  Vec3 center = Vec3::Zero();
  // Cached radial solution for building member rays.
  std::optional<ConicalParts> cone;
  std::optional<SphericalParts> sphere;
};

RingModel solve_ring(const NonCentralModel& model, const ImageGrid& grid,
                     int ring) {
  RingModel out;
  const int max_ring = int(std::lround(grid.r_hat_max()));
  if (ring > max_ring) return out;
  if (const auto* cone = std::get_if<ConicalCat>(&model)) {
    out.cone = conical_parts(ring_tan_radius(ring, grid, cone->beta_max), *cone);
    if (out.cone) {
      out.valid = true;
      out.center = Vec3(0, 0, out.cone->z_r);
    }
  } else if (const auto* sph = std::get_if<SphericalCat>(&model)) {
    out.sphere =
        spherical_parts(ring_tan_radius(ring, grid, sph->beta_max), *sph);
    if (out.sphere) {
      out.valid = true;
      out.center = Vec3(0, 0, out.sphere->z_r);
    }
  }
  return out;
}

}  // namespace

std::vector<PixelGroup> enumerate_groups(const NonCentralModel& model,
                                         const ImageGrid& grid) {
  std::vector<PixelGroup> groups;
  if (const auto* pano = std::get_if<NCPanorama>(&model)) {
    groups.resize(grid.u_max);
    for (int u = 0; u < grid.u_max; ++u) {
      groups[u].key = u;
      groups[u].center = nc_panorama_center(u + 0.5, grid, *pano);
      groups[u].valid = true;
      groups[u].pixels.reserve(grid.v_max);
      for (int v = 0; v < grid.v_max; ++v) groups[u].pixels.push_back({u, v});
    }
    return groups;
  }
  std::map<int, PixelGroup> by_ring;
  for (int v = 0; v < grid.v_max; ++v)
    for (int u = 0; u < grid.u_max; ++u) {
      const int ring = ring_of(disc_pixel(u + 0.5, v + 0.5, grid).r_hat);
      auto& g = by_ring[ring];
      g.key = ring;
      g.pixels.push_back({u, v});
    }
  groups.reserve(by_ring.size());
  for (auto& [ring, g] : by_ring) {
    const RingModel rm = solve_ring(model, grid, ring);
    g.valid = rm.valid;
    g.center = rm.center;
    groups.push_back(std::move(g));
  }
  return groups;
}

NCPixelRay nc_pixel_ray(const NonCentralModel& model, const ImageGrid& grid,
                        int u, int v) {
  if (const auto* pano = std::get_if<NCPanorama>(&model))
    return {nc_panorama_ray(u + 0.5, v + 0.5, grid, *pano), u, true};

  const DiscPixel px = disc_pixel(u + 0.5, v + 0.5, grid);
  const int ring = ring_of(px.r_hat);
  const RingModel rm = solve_ring(model, grid, ring);
  NCPixelRay out;
  out.group = ring;
  if (!rm.valid) return out;
  out.in_fov = px.r_hat <= grid.r_hat_max();
  if (const auto* cone = std::get_if<ConicalCat>(&model)) {
    out.ray = conical_polar_ray(ring_tan_radius(ring, grid, cone->beta_max),
                                px.theta, *rm.cone)
                  .ray;
  } else {
    const auto* sph = std::get_if<SphericalCat>(&model);
    out.ray = spherical_polar_ray(ring_tan_radius(ring, grid, sph->beta_max),
                                  px.theta, *rm.sphere);
  }
  return out;
}

env::RenderOutput compose_noncentral(const NonCentralModel& model,
                                     const ImageGrid& grid,
                                     const geo::Pose& pose,
                                     env::RenderMode mode,
                                     const env::EnvironmentOracle& oracle,
                                     const NCRenderOptions& opts,
                                     NCRenderStats* stats) {
  if (!oracle.movable())
    throw std::invalid_argument(
        "compose_noncentral: oracle cannot answer rays away from its fixed "
        "center; non-central models need per-group viewpoints");
  const int workers = resolve_workers(opts.workers);
  env::RenderOutput out;
  out.mode = mode;
  const bool is_depth = mode == env::RenderMode::Depth;
  if (is_depth)
    out.depth = env::ImageF64(grid.u_max, grid.v_max,
                              std::numeric_limits<double>::quiet_NaN());
  else
    out.color = env::ImageRgba8(grid.u_max, grid.v_max, {0, 0, 0, 0});

  const std::vector<PixelGroup> groups = enumerate_groups(model, grid);
  if (stats) {
    stats->acquisitions = 0;
    stats->centers.clear();
    for (const auto& g : groups)
      if (g.valid) {
        ++stats->acquisitions;
        stats->centers.push_back(
            {g.key, pose.position + pose.orientation * g.center});
      }
  }

  parallel_for(int(groups.size()), workers, [&](int gi) {
    const PixelGroup& g = groups[gi];
    if (!g.valid) return;
    const Vec3 center_w = pose.position + pose.orientation * g.center;
    env::CubeMap cube;
    if (opts.via_cubemap)
      cube = env::acquire_cubemap(oracle, center_w, geo::Mat3::Identity(),
                                  opts.cube_face_res, mode, 1);
    for (const auto& [i, j] : g.pixels) {
      const NCPixelRay pr = nc_pixel_ray(model, grid, i, j);
      if (!pr.in_fov) continue;
      const PluckerRay world = pr.ray.transformed(pose);
      const env::RaySample s =
          opts.via_cubemap
              ? env::cubemap_sample(cube, world.xi, opts.lit_filter)
              : oracle.sample(center_w, world.xi, mode);
      if (is_depth) {
        out.depth.at(i, j) = s.depth;
      } else {
        const env::Rgb8 c =
            mode == env::RenderMode::Lit ? s.color : s.label_color;
        out.color.at(i, j) = {c.r, c.g, c.b, 255};
      }
    }
  });
  return out;
}

}  // namespace omnisynth::nc
