#include "omnisynth/cubemap.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "omnisynth/depth_io.hpp"
#include "omnisynth/parallel.hpp"
#include "omnisynth/png_io.hpp"

namespace omnisynth::env {

namespace {

const CubeFaceBasis kBases[6] = {
    {{1, 0, 0}, {0, -1, 0}, {0, 0, 1}},    // +X
    {{-1, 0, 0}, {0, 1, 0}, {0, 0, 1}},    // -X
    {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}},     // +Y
    {{0, -1, 0}, {-1, 0, 0}, {0, 0, 1}},   // -Y
    {{0, 0, 1}, {0, -1, 0}, {-1, 0, 0}},   // +Z
    {{0, 0, -1}, {0, -1, 0}, {1, 0, 0}},   // -Z
};

const char* kSuffixes[6] = {"px", "nx", "py", "ny", "pz", "nz"};

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

const CubeFaceBasis& cube_face_basis(CubeFace f) { return kBases[int(f)]; }
const char* cube_face_suffix(CubeFace f) { return kSuffixes[int(f)]; }

CubeFace cube_face_select(const Vec3& dir) {
  const double ax = std::abs(dir.x());
  const double ay = std::abs(dir.y());
  const double az = std::abs(dir.z());
  const double m = std::max({ax, ay, az});
  if (ax == m && dir.x() > 0) return CubeFace::PX;
  if (ax == m && dir.x() < 0) return CubeFace::NX;
  if (ay == m && dir.y() > 0) return CubeFace::PY;
  if (ay == m && dir.y() < 0) return CubeFace::NY;
  if (az == m && dir.z() > 0) return CubeFace::PZ;
  return CubeFace::NZ;
}

CubeMap::CubeMap(int face_res, RenderMode mode, Vec3 center, Mat3 orientation)
    : f_(face_res), mode_(mode), center_(std::move(center)),
      orient_(std::move(orientation)) {
  for (int k = 0; k < 6; ++k) {
    if (mode == RenderMode::Depth)
      depth_[k] = ImageF32(f_, f_);
    else
      rgb_[k] = ImageRgb8(f_, f_);
  }
}

CubeMap acquire_cubemap(const EnvironmentOracle& oracle, const Vec3& center,
                        const Mat3& orientation, int face_res, RenderMode mode,
                        int workers) {
  if (face_res < 1) throw std::invalid_argument("acquire_cubemap: face_res < 1");
  CubeMap cm(face_res, mode, center, orientation);
  // One task per face row across all six faces; writes are disjoint.
  parallel_for(6 * face_res, workers, [&](int task) {
    const int face = task / face_res;
    const int j = task % face_res;
    const CubeFaceBasis& basis = kBases[face];
    const double t = 1.0 - 2.0 * (j + 0.5) / face_res;
    for (int i = 0; i < face_res; ++i) {
      const double s = 2.0 * (i + 0.5) / face_res - 1.0;
      const Vec3 local = basis.normal + s * basis.right + t * basis.up;
      const Vec3 dir = (orientation * local).normalized();
      const RaySample smp = oracle.sample(center, dir, mode);
      if (mode == RenderMode::Depth)
        cm.depth_at(CubeFace(face), i, j) = float(smp.depth);
      else
        cm.rgb_at(CubeFace(face), i, j) =
            mode == RenderMode::Lit ? smp.color : smp.label_color;
    }
  });
  return cm;
}

RaySample cubemap_sample(const CubeMap& cm, const Vec3& dir,
                         CubeFilter lit_filter) {
  const Vec3 local = cm.orientation().transpose() * dir;
  const CubeFace face = cube_face_select(local);
  const CubeFaceBasis& basis = kBases[int(face)];
  const double axis = local.dot(basis.normal);
  const double s = local.dot(basis.right) / axis;
  const double t = local.dot(basis.up) / axis;
  const int F = cm.face_res();
  const double fi = (s + 1.0) * F / 2.0 - 0.5;
  const double fj = (1.0 - t) * F / 2.0 - 0.5;

  RaySample out;
  if (cm.mode() == RenderMode::Depth) {
    const int i = clampi(int(std::lround(fi)), 0, F - 1);
    const int j = clampi(int(std::lround(fj)), 0, F - 1);
    out.depth = cm.depth_at(face, i, j);
    return out;
  }
  if (cm.mode() == RenderMode::Semantic || lit_filter == CubeFilter::Nearest) {
    const int i = clampi(int(std::lround(fi)), 0, F - 1);
    const int j = clampi(int(std::lround(fj)), 0, F - 1);
    const Rgb8 c = cm.rgb_at(face, i, j);
    if (cm.mode() == RenderMode::Semantic) {
      out.label_color = c;
      out.label = pack_rgb(c);
    } else {
      out.color = c;
    }
    return out;
  }
  // Bilinear lit lookup, clamped at face borders (no cross-face blending).
  const int i0 = clampi(int(std::floor(fi)), 0, F - 1);
  const int j0 = clampi(int(std::floor(fj)), 0, F - 1);
  const int i1 = clampi(i0 + 1, 0, F - 1);
  const int j1 = clampi(j0 + 1, 0, F - 1);
  const double fx = std::clamp(fi - i0, 0.0, 1.0);
  const double fy = std::clamp(fj - j0, 0.0, 1.0);
  const Rgb8 c00 = cm.rgb_at(face, i0, j0), c10 = cm.rgb_at(face, i1, j0);
  const Rgb8 c01 = cm.rgb_at(face, i0, j1), c11 = cm.rgb_at(face, i1, j1);
  auto lerp2 = [&](uint8_t a, uint8_t b, uint8_t c, uint8_t d) {
    const double top = a + (b - a) * fx;
    const double bot = c + (d - c) * fx;
    return uint8_t(std::lround(top + (bot - top) * fy));
  };
  out.color = {lerp2(c00.r, c10.r, c01.r, c11.r),
               lerp2(c00.g, c10.g, c01.g, c11.g),
               lerp2(c00.b, c10.b, c01.b, c11.b)};
  return out;
}

void CubeMapOracle::put(CubeMap cm) {
  maps_[int(cm.mode())] = std::move(cm);
}

const CubeMap& CubeMapOracle::map(RenderMode mode) const {
  const auto& slot = maps_[int(mode)];
  if (!slot) throw std::runtime_error("cube map mode not loaded");
  return *slot;
}

Vec3 CubeMapOracle::center() const {
  for (const auto& slot : maps_)
    if (slot) return slot->center();
  throw std::runtime_error("cube map oracle is empty");
}

RaySample CubeMapOracle::sample(const Vec3&, const Vec3& dir,
                                RenderMode mode) const {
  return cubemap_sample(map(mode), dir);
}

void save_cubemap(const CubeMap& cm, const std::string& prefix) {
  for (int k = 0; k < 6; ++k) {
    const std::string base = prefix + "_" + kSuffixes[k];
    if (cm.mode() == RenderMode::Depth)
      write_depth_raw(base + ".depth", cm.depth_face(CubeFace(k)));
    else
      write_png(base + ".png", cm.rgb_face(CubeFace(k)));
  }
  std::ofstream out(prefix + ".cubemap");
  if (!out) throw std::runtime_error("cannot write sidecar: " + prefix);
  out.precision(17);
  out << "mode " << mode_name(cm.mode()) << "\n";
  out << "face_res " << cm.face_res() << "\n";
  out << "center " << cm.center().x() << " " << cm.center().y() << " "
      << cm.center().z() << "\n";
  out << "orientation";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out << " " << cm.orientation()(r, c);
  out << "\n";
}

CubeMap load_cubemap(const std::string& prefix) {
  std::ifstream in(prefix + ".cubemap");
  if (!in) throw std::runtime_error("cannot open sidecar: " + prefix + ".cubemap");
  std::string key, mode_str;
  int face_res = 0;
  Vec3 center = Vec3::Zero();
  Mat3 orient = Mat3::Identity();
  while (in >> key) {
    if (key == "mode") in >> mode_str;
    else if (key == "face_res") in >> face_res;
    else if (key == "center") in >> center.x() >> center.y() >> center.z();
    else if (key == "orientation")
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) in >> orient(r, c);
    else throw std::runtime_error("unknown sidecar key: " + key);
  }
  RenderMode mode;
  if (mode_str == "lit") mode = RenderMode::Lit;
  else if (mode_str == "semantic") mode = RenderMode::Semantic;
  else if (mode_str == "depth") mode = RenderMode::Depth;
  else throw std::runtime_error("bad sidecar mode: " + mode_str);
  if (face_res < 1) throw std::runtime_error("bad sidecar face_res");

  CubeMap cm(face_res, mode, center, orient);
  for (int k = 0; k < 6; ++k) {
    const std::string base = prefix + "_" + kSuffixes[k];
    if (mode == RenderMode::Depth) {
      ImageF32 img = read_depth_raw(base + ".depth");
      if (img.width() != face_res || img.height() != face_res)
        throw std::runtime_error("face size mismatch: " + base);
      cm.depth_face(CubeFace(k)) = std::move(img);
    } else {
      ImageRgb8 img = read_png_rgb8(base + ".png");
      if (img.width() != face_res || img.height() != face_res)
        throw std::runtime_error("face size mismatch: " + base);
      cm.rgb_face(CubeFace(k)) = std::move(img);
    }
  }
  return cm;
}

}  // namespace omnisynth::env
