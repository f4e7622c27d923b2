#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "omnisynth/cubemap.hpp"
#include "omnisynth/geometry.hpp"
#include "omnisynth/image.hpp"

namespace omnisynth::central {

using geo::Mat3;
using geo::Vec2;
using geo::Vec3;

// Pixel lattice of the output image. Integer pixel (i, j) has its center at
// continuous coordinates (i + 0.5, j + 0.5); all mapping functions below take
// continuous coordinates.
struct ImageGrid {
  int u_max = 0;
  int v_max = 0;

  ImageGrid() = default;
  ImageGrid(int w, int h);

  Vec2 center() const { return {u_max / 2.0, v_max / 2.0}; }
  // Radius of the rendered disc for revolution-symmetric models.
  double r_hat_max() const { return std::min(u_max, v_max) / 2.0; }
};

enum class FisheyeLens { EquiAngular, Stereographic, Orthogonal, EquiSolid };
enum class MirrorKind { Para, Hyper };

const char* fisheye_lens_name(FisheyeLens lens);

struct Equirect {};

// Angles map linearly to pixels. The wrapped-cylinder variant instead spaces
// rows linearly in tan(phi) (points projected onto the cylinder wall).
struct Cylindrical {
  double fov_h = geo::kPi * 2;  // (0, 2*pi]
  double fov_v = geo::kPi / 2;  // (0, pi)
  bool tan_vertical = false;
};

struct Fisheye {
  FisheyeLens lens = FisheyeLens::EquiAngular;
  double f = 0.0;  // pixels
};

// Perspective intrinsics of the camera observing the mirror.
struct PinholeK {
  double f_x = 0.0, f_y = 0.0;
  double u_0 = 0.0, v_0 = 0.0;
};

// Single-viewpoint mirror camera in the sphere-model parameterization.
// A world ray is intersected with the unit sphere; the sphere point is
// projected through the mirror map into a normalized plane and then into
// pixels by H = K * R * M with M = diag(eta - xi, xi - eta, 1).
struct Catadioptric {
  MirrorKind mirror = MirrorKind::Para;
  double d = 1.0;  // camera-mirror distance, meters
  double p = 0.5;  // semi-latus rectum / 2, meters
  PinholeK k;
  Mat3 r_c = Mat3::Identity();

  double xi() const;
  double eta() const;
  // Alternate mirror-scaling constant from the forward-model convention;
  // satisfies psi() == xi() - eta() for both mirror kinds. Diagnostic only:
  // the projection path is built exclusively from eta().
  double psi() const { return xi() - eta(); }
  Mat3 h() const;      // K * R * M
  Mat3 h_inv() const;  // cached-free explicit inverse of h()
};

// Polynomial ray model: pixel offset (du, dv) from the distortion center
// lifts to the ray (du, dv, a0 + a1*rho + ... + aN*rho^N), rho = |(du, dv)|.
struct Scaramuzza {
  std::vector<double> a{1.0};  // a[0] != 0
  double u_0 = 0.0, v_0 = 0.0;

  double poly(double rho) const;
};

// Radially symmetric lens model u = c - f * d(theta) * (sin, -cos)(azimuth)
// with d(theta) = theta + k1 t^3 + k2 t^5 + k3 t^7 + k4 t^9. With all k = 0
// it coincides with the equi-angular fish-eye mapping.
struct KannalaBrandt {
  double f_x = 0.0, f_y = 0.0;
  double c_x = 0.0, c_y = 0.0;
  double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0;

  double dist(double theta) const;        // d(theta)
  double dist_deriv(double theta) const;  // d'(theta)
  // Inverts d(theta) = target on [0, pi]: Newton from theta0 = target with a
  // bracket-scan bisection fallback. Throws std::runtime_error when no
  // solution exists in range.
  double solve_theta(double target) const;
};

using CentralModel =
    std::variant<Equirect, Cylindrical, Fisheye, Catadioptric, Scaramuzza,
                 KannalaBrandt>;

// ---- per-model pixel-to-ray maps (continuous pixel coordinates) ----

geo::SphericalElev equirect_pixel_to_angles(double u, double v,
                                            const ImageGrid& grid);
geo::SphericalElev cylindrical_pixel_to_angles(double u, double v,
                                               const ImageGrid& grid,
                                               const Cylindrical& model);

// Fish-eye family: the rendered region is the centered disc of radius
// r_hat_max; nullopt marks pixels outside it or beyond the lens domain.
std::optional<Vec3> fisheye_pixel_to_ray(double u, double v,
                                         const ImageGrid& grid,
                                         FisheyeLens lens, double f);

// nullopt when the back-projection square root has no real solution. The
// rendered-disc mask is applied by backproject(), not here.
std::optional<Vec3> catadioptric_pixel_to_ray(double u, double v,
                                              const Catadioptric& model);

// Total maps (every pixel yields a ray).
Vec3 scaramuzza_pixel_to_ray(double u, double v, const Scaramuzza& model);
Vec3 kannala_brandt_pixel_to_ray(double u, double v,
                                 const KannalaBrandt& model);

// Unified back-projection with composition semantics: applies each model's
// field-of-view mask (centered disc for the revolution-symmetric models) and
// returns a unit camera-frame ray for pixels that are rendered.
std::optional<Vec3> backproject(const CentralModel& model,
                                const ImageGrid& grid, double u, double v);

// Forward projection (camera-frame direction to continuous pixel), the
// inverse of backproject on its image. nullopt when the direction leaves the
// model's field of view.
std::optional<Vec2> forward_project(const CentralModel& model,
                                    const ImageGrid& grid, const Vec3& dir);

// Forward radial map r_hat(phi_polar) of the fish-eye lenses; nullopt beyond
// the lens domain (e.g. orthogonal past 90 degrees).
std::optional<double> fisheye_forward_radius(FisheyeLens lens, double f,
                                             double phi);

bool model_is_disc(const CentralModel& model);

// ---- composition ----

enum class SamplePath { Direct, ViaCubeMap };

struct CentralRenderOptions {
  SamplePath path = SamplePath::Direct;
  // Cube-map face resolution for ViaCubeMap; 0 picks 4 * grid width.
  int cube_face_res = 0;
  env::CubeFilter lit_filter = env::CubeFilter::Bilinear;
  int workers = 0;  // 0 = resolve from environment/hardware
};

// Renders one mode of one model at one pose. Pixels outside the model's FOV
// are (0,0,0,0) in color modes and NaN in depth mode. Parallel over rows;
// output is identical for any worker count.
env::RenderOutput compose_central(const CentralModel& model,
                                  const ImageGrid& grid, const geo::Pose& pose,
                                  env::RenderMode mode,
                                  const env::EnvironmentOracle& oracle,
                                  const CentralRenderOptions& opts = {});

}  // namespace omnisynth::central
