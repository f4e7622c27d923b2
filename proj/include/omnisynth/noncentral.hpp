#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "omnisynth/central.hpp"
#include "omnisynth/cubemap.hpp"
#include "omnisynth/geometry.hpp"

namespace omnisynth::nc {

using central::ImageGrid;
using geo::Vec3;

// Panorama whose column optical centers lie on a circle of radius r_c,
// optionally pitched by `tilt` (the circle leans about the Y axis).
struct NCPanorama {
  double r_c = 0.3;            // meters, > 0 (0 degenerates to equirect)
  Vec3 center = Vec3::Zero();  // circle center, camera frame
  double tilt = 0.0;           // radians
};

// Perspective camera at the origin looking up +Z at a cone mirror. z_c and
// r_c place the circle of effective optical centers; tau is the cone
// half-angle, limited to (0, pi/4). beta_max is the half-angle of the host
// camera's view of the mirror and fixes the pixel-radius normalization.
struct ConicalCat {
  double z_c = 0.0;
  double r_c = 0.0;
  double tau = 0.0;
  double beta_max = 0.0;
};

// Perspective camera at the origin looking up +Z at a sphere mirror whose
// bottom is z_m away and whose radius is r_s.
struct SphericalCat {
  double z_m = 0.3;
  double r_s = 0.35;
  double beta_max = 0.0;
};

using NonCentralModel = std::variant<NCPanorama, ConicalCat, SphericalCat>;

// Builds the cone model from its physical shape: apex at height z_a with
// half-angle tau. The induced circle of optical centers has
// z_c = 2 z_a sin^2(tau) and r_c = z_a sin(2 tau).
ConicalCat conical_from_apex(double z_a, double tau, double beta_max);

// ---- per-model ray maps (continuous pixel coordinates) ----

Vec3 nc_panorama_center(double u, const ImageGrid& grid,
                        const NCPanorama& model);
geo::PluckerRay nc_panorama_ray(double u, double v, const ImageGrid& grid,
                                const NCPanorama& model);

struct ConicalRay {
  geo::PluckerRay ray;
  double z_r = 0.0;  // height where the ray crosses the mirror axis
};
// nullopt at the cot(phi) singularity ring or outside the rendered disc.
std::optional<ConicalRay> conical_ray(double u, double v,
                                      const ImageGrid& grid,
                                      const ConicalCat& model);

// Intermediate quantities of the mirror-reflection solution, exposed for
// diagnostics and tests.
struct SphericalRayInfo {
  double gamma = 0.0, delta = 0.0, eps = 0.0, zeta = 0.0;
  double z_r = 0.0;  // axis-crossing height of the reflected line
};
// nullopt when the pixel's view ray misses the mirror (gamma < 0) or the
// pixel is outside the rendered disc.
std::optional<geo::PluckerRay> spherical_cat_ray(double u, double v,
                                                 const ImageGrid& grid,
                                                 const SphericalCat& model,
                                                 SphericalRayInfo* info = nullptr);

// ---- pixel groups ----

// Pixels sharing one optical center: a panorama column, or a one-pixel-wide
// ring of the disc models (whose shared center sits on the mirror axis).
// Groups partition the full pixel grid; `valid` is false for groups whose
// center is undefined (singular or mirror-missing rings), and their pixels
// render as out-of-FOV.
struct PixelGroup {
  int key = 0;
  Vec3 center = Vec3::Zero();  // camera frame
  bool valid = false;
  std::vector<std::pair<int, int>> pixels;
};

std::vector<PixelGroup> enumerate_groups(const NonCentralModel& model,
                                         const ImageGrid& grid);

// Ray actually cast for pixel (u, v): the disc models evaluate their radial
// term at the pixel's integer ring radius, so every member ray passes
// exactly through its group's center.
struct NCPixelRay {
  geo::PluckerRay ray;
  int group = 0;
  bool in_fov = false;
};
NCPixelRay nc_pixel_ray(const NonCentralModel& model, const ImageGrid& grid,
                        int u, int v);

// ---- composition ----

struct NCRenderOptions {
  int workers = 0;
  // When true each group acquires a small cube map at its center and pixels
  // sample it; otherwise pixels query the oracle directly from the center.
  bool via_cubemap = false;
  int cube_face_res = 64;
  env::CubeFilter lit_filter = env::CubeFilter::Bilinear;
};

struct NCRenderStats {
  long acquisitions = 0;                      // one per valid group
  std::vector<std::pair<int, Vec3>> centers;  // group key -> world center
};

// Renders group by group (each group owns one acquisition center), rings
// from the disc center outward. Out-of-FOV pixels are (0,0,0,0) / NaN.
// Groups are processed in parallel; output is identical for any schedule.
env::RenderOutput compose_noncentral(const NonCentralModel& model,
                                     const ImageGrid& grid,
                                     const geo::Pose& pose,
                                     env::RenderMode mode,
                                     const env::EnvironmentOracle& oracle,
                                     const NCRenderOptions& opts = {},
                                     NCRenderStats* stats = nullptr);

}  // namespace omnisynth::nc
