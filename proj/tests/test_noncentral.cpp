#include "omnisynth/noncentral.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstring>
#include <mutex>
#include <random>
#include <set>

#include "omnisynth/scene.hpp"
#include "oracles.hpp"

using namespace omnisynth;
using central::ImageGrid;
using geo::kPi;
using geo::PluckerRay;
using geo::Vec3;

namespace {

std::mt19937_64 rng(41);

double urand(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Pixel at disc radius r and azimuth theta (u right, v down, theta
// counter-clockwise from +u).
geo::Vec2 disc_px(const ImageGrid& g, double r, double theta) {
  return {g.center().x() + r * std::cos(theta),
          g.center().y() - r * std::sin(theta)};
}

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

// Records every distinct ray origin the composer asks about.
class CountingOracle final : public env::EnvironmentOracle {
 public:
  explicit CountingOracle(env::Scene s) : scene_(std::move(s)) {}
  env::RaySample sample(const Vec3& o, const Vec3& d,
                        env::RenderMode) const override {
    {
      std::lock_guard<std::mutex> lock(mu_);
      origins_.insert({o.x(), o.y(), o.z()});
    }
    return env::scene_cast(scene_, o, d);
  }
  bool movable() const override { return true; }
  size_t distinct_origins() const {
    std::lock_guard<std::mutex> lock(mu_);
    return origins_.size();
  }

 private:
  env::Scene scene_;
  mutable std::mutex mu_;
  mutable std::set<std::array<double, 3>> origins_;
};

bool depth_bits_equal(const env::ImageF64& a, const env::ImageF64& b) {
  return a.width() == b.width() && a.height() == b.height() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST(NCPanorama, CentersLieOnTheCircle) {
  const ImageGrid g(128, 64);
  nc::NCPanorama m;
  m.r_c = 0.4;
  m.center = Vec3(0.1, -0.2, 0.05);
  m.tilt = geo::deg2rad(10.0);
  for (int k = 0; k < 200; ++k) {
    const double u = urand(0.0, 128.0);
    const Vec3 c = nc::nc_panorama_center(u, g, m);
    EXPECT_NEAR((c - m.center).norm(), m.r_c, 1e-12);
  }
  // theta = 0 at the image center column.
  const Vec3 mid = nc::nc_panorama_center(64.0, g, m);
  const Vec3 want = m.center + m.r_c * Vec3(std::cos(m.tilt), 0.0, std::sin(m.tilt));
  EXPECT_LT((mid - want).norm(), 1e-12);
}

TEST(NCPanorama, RayPassesThroughItsColumnCenter) {
  const ImageGrid g(128, 64);
  nc::NCPanorama m;
  m.r_c = 0.5;
  m.tilt = geo::deg2rad(-15.0);
  for (int k = 0; k < 500; ++k) {
    const double u = urand(0.0, 128.0), v = urand(0.0, 64.0);
    const PluckerRay ray = nc::nc_panorama_ray(u, v, g, m);
    EXPECT_LT(std::abs(ray.side_constraint()), 1e-12);
    EXPECT_LT(ray.distance_to_point(nc::nc_panorama_center(u, g, m)), 1e-12);
    // Direction is the plain panoramic direction for those pixel angles.
    const double theta = (2.0 * u / 128.0 - 1.0) * kPi;
    const double phi = (0.5 - v / 64.0) * kPi;
    EXPECT_LT(angle_between(ray.xi,
                            geo::spherical_to_dir(geo::SphericalElev{theta, phi})),
              1e-12);
  }
}

TEST(NCPanorama, ZeroRadiusDegeneratesToSingleCenter) {
  const ImageGrid g(64, 32);
  nc::NCPanorama m;
  m.r_c = 0.0;
  for (int k = 0; k < 200; ++k) {
    const PluckerRay ray =
        nc::nc_panorama_ray(urand(0.0, 64.0), urand(0.0, 32.0), g, m);
    EXPECT_LT(ray.distance_to_point(Vec3::Zero()), 1e-15);
    EXPECT_LT(ray.xi_bar.norm(), 1e-15);
  }
}

TEST(Conical, InnermostRingCrossesTheApex) {
  const double z_a = 0.5, tau = geo::deg2rad(35.0);
  const nc::ConicalCat m = nc::conical_from_apex(z_a, tau, geo::deg2rad(30.0));
  EXPECT_NEAR(m.z_c, 2 * z_a * std::sin(tau) * std::sin(tau), 1e-15);
  EXPECT_NEAR(m.r_c, z_a * std::sin(2 * tau), 1e-15);
  const ImageGrid g(64, 64);
  // The exact disc center has pixel radius zero.
  const auto center_ray = nc::conical_ray(32.0, 32.0, g, m);
  ASSERT_TRUE(center_ray);
  EXPECT_NEAR(center_ray->z_r, z_a, 1e-12);
  // Its direction leaves the axis at the reflection angle 2*tau.
  EXPECT_NEAR(angle_between(center_ray->ray.xi, Vec3(0, 0, 1)), 2 * tau, 1e-12);
}

TEST(Conical, MatchesBruteForceReflection) {
  const ImageGrid g(256, 256);
  for (const double tau : {0.3, 0.55, 0.7}) {
    const double z_a = 0.8;
    const double beta_max = geo::deg2rad(32.0);
    const nc::ConicalCat m = nc::conical_from_apex(z_a, tau, beta_max);
    int checked = 0;
    for (int k = 0; k < 2500; ++k) {
      const double r = urand(1.0, 127.0);
      const double theta = urand(-kPi, kPi);
      const auto px = disc_px(g, r, theta);
      const auto got = nc::conical_ray(px.x(), px.y(), g, m);
      const double r_n = r / g.r_hat_max() * std::tan(beta_max);
      const auto oracle = test::reflect_cone(r_n, theta, z_a, tau);
      ASSERT_TRUE(got);
      if (!oracle) continue;
      ++checked;
      EXPECT_LT(angle_between(got->ray.xi, oracle->dir), 1e-9);
      EXPECT_LT(got->ray.distance_to_point(oracle->point), 1e-9);
      EXPECT_LT(got->ray.distance_to_point(Vec3(0, 0, got->z_r)), 1e-9);
    }
    EXPECT_GT(checked, 700);
  }
}

TEST(Conical, SingularRingIsRejected) {
  // Make the grazing radius land inside the disc: r_n == tan(2 tau) there.
  const double tau = geo::deg2rad(20.0);
  const double beta_max = geo::deg2rad(50.0);
  nc::ConicalCat m = nc::conical_from_apex(1.0, tau, beta_max);
  const ImageGrid g(64, 64);
  const double r_sing =
      std::tan(2 * tau) / std::tan(beta_max) * g.r_hat_max();
  ASSERT_LT(r_sing, g.r_hat_max());
  const auto px = disc_px(g, r_sing, 0.7);
  EXPECT_FALSE(nc::conical_ray(px.x(), px.y(), g, m));
  // Just beyond the disc edge: rejected by the mask.
  const auto outside = disc_px(g, g.r_hat_max() + 0.5, 0.7);
  EXPECT_FALSE(nc::conical_ray(outside.x(), outside.y(), g, m));
}

TEST(Spherical, MatchesBruteForceReflection) {
  const ImageGrid g(256, 256);
  nc::SphericalCat m;
  m.z_m = 0.3;
  m.r_s = 0.35;
  m.beta_max = geo::deg2rad(30.0);
  const double z_s = m.z_m + m.r_s;
  int checked = 0;
  for (int k = 0; k < 1500; ++k) {
    const double r = urand(0.5, 127.5);
    const double theta = urand(-kPi, kPi);
    const auto px = disc_px(g, r, theta);
    nc::SphericalRayInfo info;
    const auto got = nc::spherical_cat_ray(px.x(), px.y(), g, m, &info);
    const double r_n = r / g.r_hat_max() * std::tan(m.beta_max);
    const auto oracle = test::reflect_sphere(r_n * std::cos(theta),
                                             r_n * std::sin(theta), z_s, m.r_s);
    ASSERT_EQ(got.has_value(), oracle.has_value()) << "r_n=" << r_n;
    if (!got) continue;
    ++checked;
    EXPECT_LT(angle_between(got->xi, oracle->dir), 1e-9);
    EXPECT_LT(got->distance_to_point(oracle->point), 1e-8);
    EXPECT_LT(got->distance_to_point(Vec3(0, 0, info.z_r)), 1e-8);
    EXPECT_GE(info.gamma, 0.0);
  }
  EXPECT_GT(checked, 1400);
}

TEST(Spherical, TangencyBoundaryMatchesTheMiss) {
  nc::SphericalCat m;
  m.z_m = 0.3;
  m.r_s = 0.35;
  m.beta_max = geo::deg2rad(40.0);  // wide enough to see past the mirror rim
  const double z_s = m.z_m + m.r_s;
  const ImageGrid g(512, 512);
  // Tangent view ray: sin(beta_t) = r_s / z_s.
  const double r_t = std::tan(std::asin(m.r_s / z_s));
  const double r_px_t = r_t / std::tan(m.beta_max) * g.r_hat_max();
  for (const double dr : {-1e-6, 1e-6}) {
    const auto px = disc_px(g, r_px_t + dr, 0.0);
    const auto got = nc::spherical_cat_ray(px.x(), px.y(), g, m);
    const double r_n = (r_px_t + dr) / g.r_hat_max() * std::tan(m.beta_max);
    const auto oracle = test::reflect_sphere(r_n, 0.0, z_s, m.r_s);
    EXPECT_EQ(got.has_value(), oracle.has_value()) << "dr=" << dr;
  }
}

TEST(Groups, PartitionTheGridExactly) {
  const ImageGrid g(64, 48);
  std::vector<nc::NonCentralModel> models;
  models.push_back(nc::NCPanorama{});
  models.push_back(nc::conical_from_apex(0.5, geo::deg2rad(35.0),
                                         geo::deg2rad(30.0)));
  models.push_back(nc::SphericalCat{0.3, 0.35, geo::deg2rad(30.0)});
  for (const auto& m : models) {
    const auto groups = nc::enumerate_groups(m, g);
    std::vector<char> seen(64 * 48, 0);
    for (const auto& grp : groups)
      for (const auto& [u, v] : grp.pixels) {
        ASSERT_GE(u, 0);
        ASSERT_LT(u, 64);
        ASSERT_GE(v, 0);
        ASSERT_LT(v, 48);
        ASSERT_EQ(seen[v * 64 + u], 0) << "pixel in two groups";
        seen[v * 64 + u] = 1;
      }
    for (char c : seen) EXPECT_EQ(c, 1);
  }
}

TEST(Groups, PanoramaHasOneValidGroupPerColumn) {
  const ImageGrid g(64, 32);
  const auto groups = nc::enumerate_groups(nc::NCPanorama{}, g);
  ASSERT_EQ(groups.size(), 64u);
  for (int u = 0; u < 64; ++u) {
    EXPECT_TRUE(groups[u].valid);
    EXPECT_EQ(groups[u].key, u);
    EXPECT_EQ(groups[u].pixels.size(), 32u);
  }
}

TEST(Groups, RingKeysMatchMemberRadii) {
  const ImageGrid g(64, 64);
  const nc::NonCentralModel m =
      nc::conical_from_apex(0.5, geo::deg2rad(35.0), geo::deg2rad(30.0));
  const auto groups = nc::enumerate_groups(m, g);
  const int max_ring = int(std::lround(g.r_hat_max()));
  for (const auto& grp : groups) {
    for (const auto& [u, v] : grp.pixels) {
      const double r = std::hypot(u + 0.5 - 32.0, v + 0.5 - 32.0);
      EXPECT_EQ(int(std::lround(r)), grp.key);
    }
    EXPECT_EQ(grp.valid, grp.key <= max_ring);
  }
}

TEST(Groups, MemberRaysPassExactlyThroughTheGroupCenter) {
  const ImageGrid g(96, 96);
  std::vector<nc::NonCentralModel> models;
  models.push_back(nc::conical_from_apex(0.5, geo::deg2rad(35.0),
                                         geo::deg2rad(30.0)));
  models.push_back(nc::SphericalCat{0.3, 0.35, geo::deg2rad(30.0)});
  models.push_back(nc::NCPanorama{0.3, Vec3::Zero(), geo::deg2rad(10.0)});
  for (const auto& m : models) {
    const auto groups = nc::enumerate_groups(m, g);
    for (const auto& grp : groups) {
      if (!grp.valid) continue;
      for (size_t s = 0; s < grp.pixels.size(); s += 7) {
        const auto [u, v] = grp.pixels[s];
        const auto pr = nc::nc_pixel_ray(m, g, u, v);
        EXPECT_EQ(pr.group, grp.key);
        if (!pr.in_fov) continue;
        EXPECT_LT(pr.ray.distance_to_point(grp.center), 1e-11)
            << "group " << grp.key << " pixel " << u << "," << v;
      }
    }
  }
}

TEST(Groups, InvalidRingsRenderOutOfView) {
  // beta_max wide enough that outer rings miss the sphere mirror entirely.
  nc::SphericalCat m;
  m.z_m = 0.3;
  m.r_s = 0.35;
  m.beta_max = geo::deg2rad(40.0);
  const ImageGrid g(64, 64);
  const auto groups = nc::enumerate_groups(nc::NonCentralModel(m), g);
  int invalid_in_disc = 0;
  for (const auto& grp : groups)
    if (!grp.valid && grp.key <= 32) ++invalid_in_disc;
  ASSERT_GT(invalid_in_disc, 0) << "expected mirror-missing rings";

  const env::SceneOracle oracle(env::reference_scene());
  const auto frame = nc::compose_noncentral(nc::NonCentralModel(m), g,
                                            geo::Pose{}, env::RenderMode::Lit,
                                            oracle);
  for (const auto& grp : groups)
    if (!grp.valid)
      for (const auto& [u, v] : grp.pixels)
        EXPECT_EQ(frame.color.at(u, v).a, 0);
}

TEST(Compose, OneAcquisitionPerValidGroup) {
  const ImageGrid g(64, 32);
  CountingOracle oracle(env::reference_scene());
  nc::NCRenderStats stats;
  nc::compose_noncentral(nc::NCPanorama{}, g, geo::Pose{},
                         env::RenderMode::Semantic, oracle, {}, &stats);
  EXPECT_EQ(stats.acquisitions, 64);
  EXPECT_EQ(oracle.distinct_origins(), 64u);
  EXPECT_EQ(stats.centers.size(), 64u);

  CountingOracle ring_oracle(env::reference_scene());
  const nc::NonCentralModel cone =
      nc::conical_from_apex(0.5, geo::deg2rad(35.0), geo::deg2rad(30.0));
  const ImageGrid disc(64, 64);
  nc::NCRenderStats ring_stats;
  nc::compose_noncentral(cone, disc, geo::Pose{}, env::RenderMode::Semantic,
                         ring_oracle, {}, &ring_stats);
  long valid = 0;
  for (const auto& grp : nc::enumerate_groups(cone, disc))
    if (grp.valid) ++valid;
  EXPECT_EQ(ring_stats.acquisitions, valid);
  EXPECT_EQ(long(ring_oracle.distinct_origins()), valid);
}

TEST(Compose, StatsCentersFollowThePose) {
  const ImageGrid g(32, 16);
  geo::Pose pose;
  pose.position = Vec3(0.2, -0.1, 0.3);
  pose.orientation = geo::yaw_pitch_roll(0.5, 0, 0);
  const env::SceneOracle oracle(env::reference_scene());
  nc::NCRenderStats stats;
  nc::NCPanorama m;
  nc::compose_noncentral(m, g, pose, env::RenderMode::Semantic, oracle, {},
                         &stats);
  ASSERT_EQ(stats.centers.size(), 32u);
  for (const auto& [key, world] : stats.centers) {
    const Vec3 local = nc::nc_panorama_center(key + 0.5, g, m);
    EXPECT_LT((world - (pose.position + pose.orientation * local)).norm(),
              1e-15);
  }
}

TEST(Compose, ZeroRadiusPanoramaEqualsEquirect) {
  const ImageGrid g(64, 32);
  const env::SceneOracle oracle(env::reference_scene());
  nc::NCPanorama m;
  m.r_c = 0.0;
  for (const auto mode : {env::RenderMode::Lit, env::RenderMode::Semantic}) {
    const auto pano =
        nc::compose_noncentral(m, g, geo::Pose{}, mode, oracle);
    const auto equi = central::compose_central(central::Equirect{}, g,
                                               geo::Pose{}, mode, oracle);
    EXPECT_EQ(pano.color, equi.color) << env::mode_name(mode);
  }
  const auto pd = nc::compose_noncentral(m, g, geo::Pose{},
                                         env::RenderMode::Depth, oracle);
  const auto ed = central::compose_central(central::Equirect{}, g, geo::Pose{},
                                           env::RenderMode::Depth, oracle);
  EXPECT_TRUE(depth_bits_equal(pd.depth, ed.depth));
}

TEST(Compose, YawShiftsPanoramaColumns) {
  const ImageGrid g(64, 32);
  const env::SceneOracle oracle(env::reference_scene());
  const nc::NCPanorama m;  // r_c = 0.3
  const auto base = nc::compose_noncentral(m, g, geo::Pose{},
                                           env::RenderMode::Semantic, oracle);
  geo::Pose yawed;
  const int shift = 16;  // quarter turn = quarter width
  yawed.orientation = geo::yaw_pitch_roll(2.0 * kPi * shift / 64.0, 0, 0);
  const auto turned = nc::compose_noncentral(m, g, yawed,
                                             env::RenderMode::Semantic, oracle);
  int agree = 0;
  for (int v = 0; v < 32; ++v)
    for (int u = 0; u < 64; ++u)
      agree += turned.color.at(u, v) == base.color.at((u + shift) % 64, v);
  EXPECT_GE(agree, 64 * 32 * 99 / 100);
}

TEST(Compose, DepthIsMeasuredFromTheGroupCenter) {
  const env::Scene scene = env::reference_scene();
  const env::SceneOracle oracle(scene);
  const ImageGrid g(64, 64);
  const nc::NonCentralModel cone =
      nc::conical_from_apex(0.5, geo::deg2rad(35.0), geo::deg2rad(30.0));
  const auto frame = nc::compose_noncentral(cone, g, geo::Pose{},
                                            env::RenderMode::Depth, oracle);
  std::map<int, Vec3> centers;
  for (const auto& grp : nc::enumerate_groups(cone, g))
    if (grp.valid) centers[grp.key] = grp.center;
  int checked = 0;
  for (int v = 4; v < 64; v += 7)
    for (int u = 4; u < 64; u += 7) {
      const auto pr = nc::nc_pixel_ray(cone, g, u, v);
      if (!pr.in_fov) {
        EXPECT_TRUE(std::isnan(frame.depth.at(u, v)));
        continue;
      }
      const Vec3 center = centers.at(pr.group);
      const double want = test::oracle_scene_depth(scene, center, pr.ray.xi);
      EXPECT_NEAR(frame.depth.at(u, v), want, 1e-9 * want);
      ++checked;
    }
  EXPECT_GT(checked, 30);
}

TEST(Compose, RejectsFixedCenterOracles) {
  const env::SceneOracle scene(env::reference_scene());
  env::CubeMapOracle fixed;
  fixed.put(env::acquire_cubemap(scene, Vec3::Zero(), geo::Mat3::Identity(), 8,
                                 env::RenderMode::Lit));
  const ImageGrid g(16, 8);
  EXPECT_THROW(nc::compose_noncentral(nc::NCPanorama{}, g, geo::Pose{},
                                      env::RenderMode::Lit, fixed),
               std::invalid_argument);
}

TEST(Compose, CubePathApproximatesDirectPath) {
  const ImageGrid g(48, 48);
  const env::SceneOracle oracle(env::reference_scene());
  const nc::NonCentralModel m = nc::SphericalCat{0.3, 0.35, geo::deg2rad(30.0)};
  nc::NCRenderOptions direct, via;
  via.via_cubemap = true;
  via.cube_face_res = 96;
  const auto a = nc::compose_noncentral(m, g, geo::Pose{},
                                        env::RenderMode::Semantic, oracle,
                                        direct);
  const auto b = nc::compose_noncentral(m, g, geo::Pose{},
                                        env::RenderMode::Semantic, oracle, via);
  int agree = 0, in_fov = 0;
  for (size_t i = 0; i < a.color.size(); ++i) {
    if (a.color.data()[i].a == 0) continue;
    ++in_fov;
    agree += a.color.data()[i] == b.color.data()[i];
  }
  ASSERT_GT(in_fov, 0);
  EXPECT_GE(agree * 100, in_fov * 95);
}

TEST(Compose, WorkerCountInvariant) {
  const ImageGrid g(48, 48);
  const env::SceneOracle oracle(env::reference_scene());
  const nc::NonCentralModel m =
      nc::conical_from_apex(0.5, geo::deg2rad(35.0), geo::deg2rad(30.0));
  nc::NCRenderOptions one, many;
  one.workers = 1;
  many.workers = 5;
  const auto a = nc::compose_noncentral(m, g, geo::Pose{},
                                        env::RenderMode::Semantic, oracle, one);
  const auto b = nc::compose_noncentral(m, g, geo::Pose{},
                                        env::RenderMode::Semantic, oracle, many);
  EXPECT_EQ(a.color, b.color);
  const auto da = nc::compose_noncentral(m, g, geo::Pose{},
                                         env::RenderMode::Depth, oracle, one);
  const auto db = nc::compose_noncentral(m, g, geo::Pose{},
                                         env::RenderMode::Depth, oracle, many);
  EXPECT_TRUE(depth_bits_equal(da.depth, db.depth));
}
