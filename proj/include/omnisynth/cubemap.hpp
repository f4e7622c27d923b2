#pragma once

#include <array>
#include <string>

#include "omnisynth/geometry.hpp"
#include "omnisynth/image.hpp"
#include "omnisynth/scene.hpp"

namespace omnisynth::env {

using geo::Mat3;

enum class CubeFace { PX = 0, NX, PY, NY, PZ, NZ };

// Face frame: dir(s, t) = normal + s * right + t * up, with s, t in [-1, 1]
// and texel centers at s = 2(i+0.5)/F - 1, t = 1 - 2(j+0.5)/F.
struct CubeFaceBasis {
  Vec3 normal, right, up;
};
const CubeFaceBasis& cube_face_basis(CubeFace f);
const char* cube_face_suffix(CubeFace f);  // "px", "nx", ...

// Picks the face whose axis component dominates |dir|. Exact ties resolve in
// +X,-X,+Y,-Y,+Z,-Z order.
CubeFace cube_face_select(const Vec3& dir);

// Six square 90-degree faces for one render mode, acquired at a fixed
// center. Lit and semantic faces hold colors; depth faces hold meters.
class CubeMap {
 public:
  CubeMap() = default;
  CubeMap(int face_res, RenderMode mode, Vec3 center, Mat3 orientation);

  int face_res() const { return f_; }
  RenderMode mode() const { return mode_; }
  const Vec3& center() const { return center_; }
  const Mat3& orientation() const { return orient_; }

  Rgb8& rgb_at(CubeFace f, int i, int j) { return rgb_[int(f)].at(i, j); }
  const Rgb8& rgb_at(CubeFace f, int i, int j) const { return rgb_[int(f)].at(i, j); }
  float& depth_at(CubeFace f, int i, int j) { return depth_[int(f)].at(i, j); }
  const float& depth_at(CubeFace f, int i, int j) const { return depth_[int(f)].at(i, j); }

  const ImageRgb8& rgb_face(CubeFace f) const { return rgb_[int(f)]; }
  const ImageF32& depth_face(CubeFace f) const { return depth_[int(f)]; }
  ImageRgb8& rgb_face(CubeFace f) { return rgb_[int(f)]; }
  ImageF32& depth_face(CubeFace f) { return depth_[int(f)]; }

 private:
  int f_ = 0;
  RenderMode mode_ = RenderMode::Lit;
  Vec3 center_ = Vec3::Zero();
  Mat3 orient_ = Mat3::Identity();
  std::array<ImageRgb8, 6> rgb_;
  std::array<ImageF32, 6> depth_;
};

enum class CubeFilter { Nearest, Bilinear };

// Answers "what does the world look like along ray (origin, dir)?" for some
// environment. Implementations must be safe to call concurrently.
class EnvironmentOracle {
 public:
  virtual ~EnvironmentOracle() = default;
  virtual RaySample sample(const Vec3& origin, const Vec3& dir,
                           RenderMode mode) const = 0;
  // Whether sample() accepts arbitrary origins (needed by non-central
  // composition and by cube-map acquisition away from the reference center).
  virtual bool movable() const = 0;
};

class SceneOracle final : public EnvironmentOracle {
 public:
  explicit SceneOracle(Scene scene) : scene_(std::move(scene)) {}
  RaySample sample(const Vec3& origin, const Vec3& dir,
                   RenderMode) const override {
    return scene_cast(scene_, origin, dir);
  }
  bool movable() const override { return true; }
  const Scene& scene() const { return scene_; }

 private:
  Scene scene_;
};

// Renders the six faces by querying the oracle from `center`. Rows of each
// face are split across workers; the result does not depend on the split.
CubeMap acquire_cubemap(const EnvironmentOracle& oracle, const Vec3& center,
                        const Mat3& orientation, int face_res, RenderMode mode,
                        int workers = 1);

// Looks up the stored sample along a world direction. Lit uses the requested
// filter (default bilinear); semantic and depth are always nearest-neighbor
// so labels and distances never blend across boundaries.
RaySample cubemap_sample(const CubeMap& cm, const Vec3& dir,
                         CubeFilter lit_filter = CubeFilter::Bilinear);

// Serves previously acquired or loaded cube maps as an oracle fixed at their
// acquisition center. Modes not loaded throw on access.
class CubeMapOracle final : public EnvironmentOracle {
 public:
  void put(CubeMap cm);
  RaySample sample(const Vec3& origin, const Vec3& dir,
                   RenderMode mode) const override;
  bool movable() const override { return false; }
  const CubeMap& map(RenderMode mode) const;
  Vec3 center() const;

 private:
  std::array<std::optional<CubeMap>, 3> maps_;
};

// File layout: <prefix>_<face>.png (lit/semantic) or <prefix>_<face>.depth
// (depth) plus <prefix>.cubemap text sidecar with resolution, mode, center
// and orientation.
void save_cubemap(const CubeMap& cm, const std::string& prefix);
CubeMap load_cubemap(const std::string& prefix);

}  // namespace omnisynth::env
