#include "omnisynth/central.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "omnisynth/parallel.hpp"

namespace omnisynth::central {

using geo::kPi;
using geo::SphericalElev;
using geo::SphericalPolar;

ImageGrid::ImageGrid(int w, int h) : u_max(w), v_max(h) {
  if (w < 1 || h < 1) throw std::invalid_argument("ImageGrid: dims must be >= 1");
}

const char* fisheye_lens_name(FisheyeLens lens) {
  switch (lens) {
    case FisheyeLens::EquiAngular: return "equiangular";
    case FisheyeLens::Stereographic: return "stereographic";
    case FisheyeLens::Orthogonal: return "orthogonal";
    case FisheyeLens::EquiSolid: return "equisolid";
  }
  return "?";
}

SphericalElev equirect_pixel_to_angles(double u, double v,
                                       const ImageGrid& grid) {
  return {(2.0 * u / grid.u_max - 1.0) * kPi,
          (0.5 - v / grid.v_max) * kPi};
}

SphericalElev cylindrical_pixel_to_angles(double u, double v,
                                          const ImageGrid& grid,
                                          const Cylindrical& model) {
  const double theta = (2.0 * u / grid.u_max - 1.0) * model.fov_h / 2.0;
  const double row = 1.0 - 2.0 * v / grid.v_max;  // +1 top, -1 bottom
  const double phi = model.tan_vertical
                         ? std::atan(row * std::tan(model.fov_v / 2.0))
                         : row * model.fov_v / 2.0;
  return {theta, phi};
}

std::optional<Vec3> fisheye_pixel_to_ray(double u, double v,
                                         const ImageGrid& grid,
                                         FisheyeLens lens, double f) {
  const Vec2 c = grid.center();
  const double du = u - c.x(), dv = v - c.y();
  const double r_hat = std::hypot(du, dv);
  if (r_hat > grid.r_hat_max()) return std::nullopt;
  const double theta = std::atan2(c.x() - u, v - c.y());
  double phi = 0.0;
  switch (lens) {
    case FisheyeLens::EquiAngular:
      phi = r_hat / f;
      break;
    case FisheyeLens::Stereographic:
      phi = 2.0 * std::atan(r_hat / (2.0 * f));
      break;
    case FisheyeLens::Orthogonal: {
      const double s = r_hat / f;
      if (s > 1.0) return std::nullopt;
      phi = std::asin(s);
      break;
    }
    case FisheyeLens::EquiSolid: {
      const double s = r_hat / f;
      if (s > 1.0) return std::nullopt;
      phi = 2.0 * std::asin(s);
      break;
    }
  }
  if (phi > kPi) return std::nullopt;
  return geo::spherical_to_dir(SphericalPolar{theta, phi});
}

double Catadioptric::xi() const {
  return mirror == MirrorKind::Para ? 1.0 : d / std::sqrt(d * d + 4 * p * p);
}

double Catadioptric::eta() const {
  return mirror == MirrorKind::Para ? -2.0 * p
                                    : -2.0 * p / std::sqrt(d * d + 4 * p * p);
}

Mat3 Catadioptric::h() const {
  Mat3 kc;
  kc << k.f_x, 0, k.u_0, 0, k.f_y, k.v_0, 0, 0, 1;
  const double e = eta(), x = xi();
  Mat3 mc = Mat3::Zero();
  mc(0, 0) = e - x;
  mc(1, 1) = x - e;
  mc(2, 2) = 1.0;
  return kc * r_c * mc;
}

Mat3 Catadioptric::h_inv() const { return h().inverse(); }

std::optional<Vec3> catadioptric_pixel_to_ray(double u, double v,
                                              const Catadioptric& model) {
  const Vec3 vbar = model.h_inv() * Vec3(u, v, 1.0);
  const double x = vbar.x(), y = vbar.y(), z = vbar.z();
  const double xi = model.xi();
  const double disc = z * z + (1.0 - xi * xi) * (x * x + y * y);
  if (disc < 0.0) return std::nullopt;
  const double a = (z * xi + std::sqrt(disc)) / vbar.squaredNorm();
  // a * vbar lies on the unit view sphere; subtracting the sphere-center
  // offset gives the outgoing ray.
  return Vec3(x * a, y * a, z * a - xi).normalized();
}

double Scaramuzza::poly(double rho) const {
  double acc = 0.0;
  for (size_t i = a.size(); i-- > 0;) acc = acc * rho + a[i];
  return acc;
}

Vec3 scaramuzza_pixel_to_ray(double u, double v, const Scaramuzza& model) {
  const double du = u - model.u_0, dv = v - model.v_0;
  const double rho = std::hypot(du, dv);
  return Vec3(du, dv, model.poly(rho)).normalized();
}

double KannalaBrandt::dist(double theta) const {
  const double t2 = theta * theta;
  return theta * (1.0 + t2 * (k1 + t2 * (k2 + t2 * (k3 + t2 * k4))));
}

double KannalaBrandt::dist_deriv(double theta) const {
  const double t2 = theta * theta;
  return 1.0 + t2 * (3 * k1 + t2 * (5 * k2 + t2 * (7 * k3 + t2 * 9 * k4)));
}

double KannalaBrandt::solve_theta(double target) const {
  if (target <= 0.0) return 0.0;
  const double tol = 1e-12 * std::max(1.0, target);
  double theta = std::min(target, kPi);
  for (int it = 0; it < 50; ++it) {
    const double err = dist(theta) - target;
    if (std::abs(err) < tol) return theta;
    const double deriv = dist_deriv(theta);
    if (deriv <= 0.0) break;  // left the monotone region; fall back
    theta -= err / deriv;
    if (theta < 0.0 || theta > kPi) break;
  }
  if (theta >= 0.0 && theta <= kPi && std::abs(dist(theta) - target) < tol)
    return theta;
  // Bracket scan + bisection over [0, pi].
  const int steps = 256;
  double lo = 0.0, g_lo = -target;
  for (int i = 1; i <= steps; ++i) {
    const double hi = kPi * i / steps;
    const double g_hi = dist(hi) - target;
    if (g_lo <= 0.0 && g_hi >= 0.0) {
      double a = lo, b = hi;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (dist(mid) - target < 0.0)
          a = mid;
        else
          b = mid;
      }
      return 0.5 * (a + b);
    }
    lo = hi;
    g_lo = g_hi;
  }
  throw std::runtime_error("kannala_brandt: no angle solves d(theta) = " +
                           std::to_string(target));
}

Vec3 kannala_brandt_pixel_to_ray(double u, double v,
                                 const KannalaBrandt& model) {
  const double mx = (u - model.c_x) / model.f_x;
  const double my = (v - model.c_y) / model.f_y;
  const double d = std::hypot(mx, my);
  const double phi = model.solve_theta(d);
  const double chi = std::atan2(-mx, my);
  return geo::spherical_to_dir(SphericalPolar{chi, phi});
}

namespace {

// Revolution-symmetric models render the centered disc only; this is the
// composition mask, separate from each model's raw pixel map.
bool in_disc(const ImageGrid& grid, double u, double v, double cu, double cv) {
  return std::hypot(u - cu, v - cv) <= grid.r_hat_max();
}

}  // namespace

bool model_is_disc(const CentralModel& model) {
  return !std::holds_alternative<Equirect>(model) &&
         !std::holds_alternative<Cylindrical>(model);
}

std::optional<Vec3> backproject(const CentralModel& model,
                                const ImageGrid& grid, double u, double v) {
  const Vec2 c = grid.center();
  return std::visit(
      [&](const auto& m) -> std::optional<Vec3> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Equirect>) {
          return geo::spherical_to_dir(equirect_pixel_to_angles(u, v, grid));
        } else if constexpr (std::is_same_v<T, Cylindrical>) {
          return geo::spherical_to_dir(
              cylindrical_pixel_to_angles(u, v, grid, m));
        } else if constexpr (std::is_same_v<T, Fisheye>) {
          return fisheye_pixel_to_ray(u, v, grid, m.lens, m.f);
        } else if constexpr (std::is_same_v<T, Catadioptric>) {
          if (!in_disc(grid, u, v, c.x(), c.y())) return std::nullopt;
          return catadioptric_pixel_to_ray(u, v, m);
        } else if constexpr (std::is_same_v<T, Scaramuzza>) {
          if (!in_disc(grid, u, v, m.u_0, m.v_0)) return std::nullopt;
          return scaramuzza_pixel_to_ray(u, v, m);
        } else {
          if (!in_disc(grid, u, v, m.c_x, m.c_y)) return std::nullopt;
          return kannala_brandt_pixel_to_ray(u, v, m);
        }
      },
      model);
}

std::optional<double> fisheye_forward_radius(FisheyeLens lens, double f,
                                             double phi) {
  switch (lens) {
    case FisheyeLens::EquiAngular:
      return f * phi;
    case FisheyeLens::Stereographic:
      if (phi >= kPi - 1e-12) return std::nullopt;
      return 2.0 * f * std::tan(phi / 2.0);
    case FisheyeLens::Orthogonal:
      if (phi > kPi / 2.0) return std::nullopt;  // mirror-image branch
      return f * std::sin(phi);
    case FisheyeLens::EquiSolid:
      return f * std::sin(phi / 2.0);
  }
  return std::nullopt;
}

namespace {

std::optional<Vec2> forward_fisheye(const Fisheye& m, const ImageGrid& grid,
                                    const Vec3& dir) {
  const SphericalPolar p = geo::dir_to_spherical_polar(dir);
  const auto r_hat = fisheye_forward_radius(m.lens, m.f, p.phi);
  if (!r_hat || *r_hat > grid.r_hat_max()) return std::nullopt;
  const Vec2 c = grid.center();
  return Vec2(c.x() - *r_hat * std::sin(p.theta),
              c.y() + *r_hat * std::cos(p.theta));
}

std::optional<Vec2> forward_catadioptric(const Catadioptric& m,
                                         const ImageGrid& grid,
                                         const Vec3& dir) {
  const Vec3 s = dir.normalized();
  const Vec3 ph = m.h() * Vec3(s.x(), s.y(), s.z() + m.xi());
  if (std::abs(ph.z()) < 1e-12) return std::nullopt;
  const Vec2 px(ph.x() / ph.z(), ph.y() / ph.z());
  const Vec2 c = grid.center();
  if (!in_disc(grid, px.x(), px.y(), c.x(), c.y())) return std::nullopt;
  // The sphere map is two-valued; keep only directions whose pixel
  // back-projects to the same ray (rejects the behind-mirror branch).
  const auto back = catadioptric_pixel_to_ray(px.x(), px.y(), m);
  if (!back || back->dot(s) < 1.0 - 1e-9) return std::nullopt;
  return px;
}

std::optional<Vec2> forward_scaramuzza(const Scaramuzza& m,
                                       const ImageGrid& grid,
                                       const Vec3& dir) {
  const double r_xy = std::hypot(dir.x(), dir.y());
  const double rho_max = grid.r_hat_max();
  if (r_xy < 1e-14) {
    if (dir.z() * m.poly(0.0) <= 0.0) return std::nullopt;
    return Vec2(m.u_0, m.v_0);
  }
  // Smallest rho with poly(rho) * r_xy == z * rho, located by scan+bisection.
  auto g = [&](double rho) { return m.poly(rho) * r_xy - dir.z() * rho; };
  const int steps = 512;
  double lo = 0.0, g_lo = g(0.0);
  std::optional<double> root;
  for (int i = 1; i <= steps && !root; ++i) {
    const double hi = rho_max * i / steps;
    const double g_hi = g(hi);
    if ((g_lo <= 0.0) != (g_hi <= 0.0)) {
      double a = lo, b = hi;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (a + b);
        if ((g(mid) <= 0.0) == (g_lo <= 0.0))
          a = mid;
        else
          b = mid;
      }
      root = 0.5 * (a + b);
    }
    lo = hi;
    g_lo = g_hi;
  }
  if (!root) return std::nullopt;
  return Vec2(m.u_0 + *root * dir.x() / r_xy, m.v_0 + *root * dir.y() / r_xy);
}

std::optional<Vec2> forward_kannala_brandt(const KannalaBrandt& m,
                                           const ImageGrid& grid,
                                           const Vec3& dir) {
  const SphericalPolar p = geo::dir_to_spherical_polar(dir);
  const double dd = m.dist(p.phi);
  const Vec2 px(m.c_x - m.f_x * dd * std::sin(p.theta),
                m.c_y + m.f_y * dd * std::cos(p.theta));
  if (!in_disc(grid, px.x(), px.y(), m.c_x, m.c_y)) return std::nullopt;
  return px;
}

}  // namespace

std::optional<Vec2> forward_project(const CentralModel& model,
                                    const ImageGrid& grid, const Vec3& dir) {
  return std::visit(
      [&](const auto& m) -> std::optional<Vec2> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Equirect>) {
          const SphericalElev s = geo::dir_to_spherical_elev(dir);
          return Vec2((s.theta / kPi + 1.0) * grid.u_max / 2.0,
                      (0.5 - s.phi / kPi) * grid.v_max);
        } else if constexpr (std::is_same_v<T, Cylindrical>) {
          const SphericalElev s = geo::dir_to_spherical_elev(dir);
          if (std::abs(s.theta) > m.fov_h / 2.0) return std::nullopt;
          const double half_v = m.fov_v / 2.0;
          double row;  // +1 top .. -1 bottom
          if (m.tan_vertical) {
            if (std::abs(s.phi) >= kPi / 2.0) return std::nullopt;
            row = std::tan(s.phi) / std::tan(half_v);
          } else {
            row = s.phi / half_v;
          }
          if (std::abs(row) > 1.0) return std::nullopt;
          return Vec2((s.theta / (m.fov_h / 2.0) + 1.0) * grid.u_max / 2.0,
                      (1.0 - row) * grid.v_max / 2.0);
        } else if constexpr (std::is_same_v<T, Fisheye>) {
          return forward_fisheye(m, grid, dir);
        } else if constexpr (std::is_same_v<T, Catadioptric>) {
          return forward_catadioptric(m, grid, dir);
        } else if constexpr (std::is_same_v<T, Scaramuzza>) {
          return forward_scaramuzza(m, grid, dir);
        } else {
          return forward_kannala_brandt(m, grid, dir);
        }
      },
      model);
}

env::RenderOutput compose_central(const CentralModel& model,
                                  const ImageGrid& grid, const geo::Pose& pose,
                                  env::RenderMode mode,
                                  const env::EnvironmentOracle& oracle,
                                  const CentralRenderOptions& opts) {
  const int workers = resolve_workers(opts.workers);
  env::RenderOutput out;
  out.mode = mode;
  const bool is_depth = mode == env::RenderMode::Depth;
  if (is_depth)
    out.depth = env::ImageF64(grid.u_max, grid.v_max,
                              std::numeric_limits<double>::quiet_NaN());
  else
    out.color = env::ImageRgba8(grid.u_max, grid.v_max, {0, 0, 0, 0});

  env::CubeMap cube;
  const bool via_cube = opts.path == SamplePath::ViaCubeMap;
  if (via_cube) {
    const int face = opts.cube_face_res > 0 ? opts.cube_face_res
                                            : 4 * grid.u_max;
    cube = env::acquire_cubemap(oracle, pose.position, Mat3::Identity(), face,
                                mode, workers);
  }

  parallel_for(grid.v_max, workers, [&](int j) {
    for (int i = 0; i < grid.u_max; ++i) {
      const auto ray = backproject(model, grid, i + 0.5, j + 0.5);
      if (!ray) continue;  // stays black / NaN
      const auto [origin, dir] = geo::compose_pose(pose, *ray);
      const env::RaySample s =
          via_cube ? env::cubemap_sample(cube, dir, opts.lit_filter)
                   : oracle.sample(origin, dir, mode);
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

}  // namespace omnisynth::central
