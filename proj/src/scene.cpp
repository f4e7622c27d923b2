#include "omnisynth/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace omnisynth::env {

namespace {

constexpr double kHitEps = 1e-12;
constexpr double kCheckerCell = 0.25;  // meters
constexpr double kCheckerDim = 0.62;
constexpr double kAmbient = 0.2;

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Vec3 normal = Vec3::UnitZ();  // geometric outward normal at the hit
  const std::string* label = nullptr;
  Rgb8 color{};
};

const char* kFaceLabels[6] = {"wall_px", "wall_nx", "wall_py",
                              "wall_ny", "floor",   "ceiling"};
const Rgb8 kFaceColors[6] = {{180, 40, 40},  {40, 180, 40}, {40, 40, 180},
                             {180, 180, 40}, {60, 60, 70},  {200, 200, 210}};
const std::string kFaceLabelStrings[6] = {kFaceLabels[0], kFaceLabels[1],
                                          kFaceLabels[2], kFaceLabels[3],
                                          kFaceLabels[4], kFaceLabels[5]};

void hit_room(const Scene& s, const Vec3& o, const Vec3& d, Hit& best) {
  const Vec3 half = s.room_half();
  for (int axis = 0; axis < 3; ++axis) {
    if (d[axis] == 0.0) continue;
    const double face = d[axis] > 0 ? half[axis] : -half[axis];
    const double t = (face - o[axis]) / d[axis];
    if (t <= kHitEps || t >= best.t) continue;
    // Verify the hit point stays on the finite face (it always does for
    // origins inside the room, but guard against rounding at corners).
    bool on_face = true;
    for (int k = 0; k < 3 && on_face; ++k) {
      if (k == axis) continue;
      on_face = std::abs(o[k] + t * d[k]) <= half[k] + 1e-9;
    }
    if (!on_face) continue;
    int idx;
    if (axis == 0)
      idx = d.x() > 0 ? 0 : 1;
    else if (axis == 1)
      idx = d.y() > 0 ? 2 : 3;
    else
      idx = d.z() > 0 ? 5 : 4;
    best.t = t;
    best.normal = Vec3::Zero();
    best.normal[axis] = d[axis] > 0 ? 1.0 : -1.0;  // outward from the room
    best.label = &kFaceLabelStrings[idx];
    best.color = kFaceColors[idx];
  }
}

void hit_box(const SceneBox& b, const Vec3& o, const Vec3& d, Hit& best) {
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  int axis_enter = -1, axis_exit = -1;
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = b.center[axis] - b.half[axis];
    const double hi = b.center[axis] + b.half[axis];
    if (d[axis] == 0.0) {
      if (o[axis] < lo || o[axis] > hi) return;
      continue;
    }
    double t0 = (lo - o[axis]) / d[axis];
    double t1 = (hi - o[axis]) / d[axis];
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_enter) { t_enter = t0; axis_enter = axis; }
    if (t1 < t_exit) { t_exit = t1; axis_exit = axis; }
  }
  if (t_enter > t_exit || t_exit <= kHitEps) return;
  const bool from_outside = t_enter > kHitEps;
  const double t = from_outside ? t_enter : t_exit;
  const int axis = from_outside ? axis_enter : axis_exit;
  if (t >= best.t || axis < 0) return;
  best.t = t;
  best.normal = Vec3::Zero();
  best.normal[axis] = from_outside ? (d[axis] > 0 ? -1.0 : 1.0)
                                   : (d[axis] > 0 ? 1.0 : -1.0);
  best.label = &b.label;
  best.color = b.color;
}

void hit_sphere(const SceneSphere& sp, const Vec3& o, const Vec3& d, Hit& best) {
  const Vec3 oc = o - sp.center;
  const double b = oc.dot(d);
  const double disc = b * b - (oc.squaredNorm() - sp.radius * sp.radius);
  if (disc < 0.0) return;
  const double sq = std::sqrt(disc);
  double t = -b - sq;
  if (t <= kHitEps) t = -b + sq;
  if (t <= kHitEps || t >= best.t) return;
  best.t = t;
  best.normal = (o + t * d - sp.center) / sp.radius;
  best.label = &sp.label;
  best.color = sp.color;
}

uint8_t to_byte(double v) {
  return uint8_t(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

bool Scene::inside_room(const Vec3& p, double margin) const {
  const Vec3 half = room_half();
  return std::abs(p.x()) < half.x() - margin &&
         std::abs(p.y()) < half.y() - margin &&
         std::abs(p.z()) < half.z() - margin;
}

Rgb8 room_face_color(int face) { return kFaceColors[face]; }
const char* room_face_label(int face) { return kFaceLabels[face]; }

RaySample scene_cast(const Scene& scene, const Vec3& origin, const Vec3& dir) {
  if (!scene.inside_room(origin))
    throw std::domain_error("scene_cast: origin outside the room");
  const Vec3 d = dir.normalized();

  Hit hit;
  hit_room(scene, origin, d, hit);
  for (const auto& b : scene.boxes) hit_box(b, origin, d, hit);
  for (const auto& s : scene.spheres) hit_sphere(s, origin, d, hit);

  RaySample out;
  out.depth = hit.t;
  out.label_color = hit.color;
  out.label = pack_rgb(hit.color);

  Vec3 n = hit.normal;
  if (n.dot(d) > 0) n = -n;  // face the viewer
  double albedo_scale = 1.0;
  if (scene.checker) {
    const Vec3 p = origin + hit.t * d;
    const long parity = std::lround(std::floor(p.x() / kCheckerCell)) +
                        std::lround(std::floor(p.y() / kCheckerCell)) +
                        std::lround(std::floor(p.z() / kCheckerCell));
    if (parity & 1) albedo_scale = kCheckerDim;
  }
  const double shade = std::max(0.0, n.dot(scene.light)) + kAmbient;
  out.color = {to_byte(hit.color.r / 255.0 * albedo_scale * shade),
               to_byte(hit.color.g / 255.0 * albedo_scale * shade),
               to_byte(hit.color.b / 255.0 * albedo_scale * shade)};
  return out;
}

Scene parse_scene_text(const std::string& text) {
  Scene scene;
  scene.boxes.clear();
  scene.spheres.clear();
  bool saw_room = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("scene line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string cmd;
    if (!(ls >> cmd)) continue;
    if (cmd == "room") {
      if (!(ls >> scene.width >> scene.depth >> scene.height))
        fail("expected: room W D H");
      if (scene.width <= 0 || scene.depth <= 0 || scene.height <= 0)
        fail("room dimensions must be positive");
      saw_room = true;
    } else if (cmd == "box") {
      SceneBox b;
      Vec3 size;
      int r, g, bl;
      if (!(ls >> b.center.x() >> b.center.y() >> b.center.z() >> size.x() >>
            size.y() >> size.z() >> b.label >> r >> g >> bl))
        fail("expected: box cx cy cz sx sy sz label r g b");
      if (size.minCoeff() <= 0) fail("box size must be positive");
      b.half = size / 2;
      b.color = {uint8_t(r), uint8_t(g), uint8_t(bl)};
      scene.boxes.push_back(b);
    } else if (cmd == "sphere") {
      SceneSphere s;
      int r, g, b;
      if (!(ls >> s.center.x() >> s.center.y() >> s.center.z() >> s.radius >>
            s.label >> r >> g >> b))
        fail("expected: sphere cx cy cz radius label r g b");
      if (s.radius <= 0) fail("sphere radius must be positive");
      s.color = {uint8_t(r), uint8_t(g), uint8_t(b)};
      scene.spheres.push_back(s);
    } else if (cmd == "light") {
      Vec3 l;
      if (!(ls >> l.x() >> l.y() >> l.z())) fail("expected: light lx ly lz");
      if (l.norm() == 0) fail("light direction must be nonzero");
      scene.light = l.normalized();
    } else if (cmd == "checker") {
      std::string flag;
      if (!(ls >> flag) || (flag != "on" && flag != "off"))
        fail("expected: checker on|off");
      scene.checker = flag == "on";
    } else {
      fail("unknown directive '" + cmd + "'");
    }
  }
  if (!saw_room) throw std::runtime_error("scene: missing 'room W D H' line");

  const Vec3 half = scene.room_half();
  std::set<std::string> labels;
  for (int f = 0; f < 6; ++f) labels.insert(kFaceLabels[f]);
  auto check_label = [&](const std::string& label) {
    if (!labels.insert(label).second)
      throw std::runtime_error("scene: duplicate label '" + label + "'");
  };
  for (const auto& b : scene.boxes) {
    check_label(b.label);
    for (int k = 0; k < 3; ++k)
      if (std::abs(b.center[k]) + b.half[k] > half[k] + 1e-9)
        throw std::runtime_error("scene: box '" + b.label + "' leaves the room");
  }
  for (const auto& s : scene.spheres) {
    check_label(s.label);
    for (int k = 0; k < 3; ++k)
      if (std::abs(s.center[k]) + s.radius > half[k] + 1e-9)
        throw std::runtime_error("scene: sphere '" + s.label + "' leaves the room");
  }
  return scene;
}

Scene load_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scene_text(ss.str());
}

std::string scene_to_text(const Scene& s) {
  std::ostringstream out;
  out.precision(17);  // exact double round trip
  out << "room " << s.width << " " << s.depth << " " << s.height << "\n";
  for (const auto& b : s.boxes)
    out << "box " << b.center.x() << " " << b.center.y() << " " << b.center.z()
        << " " << 2 * b.half.x() << " " << 2 * b.half.y() << " "
        << 2 * b.half.z() << " " << b.label << " " << int(b.color.r) << " "
        << int(b.color.g) << " " << int(b.color.b) << "\n";
  for (const auto& sp : s.spheres)
    out << "sphere " << sp.center.x() << " " << sp.center.y() << " "
        << sp.center.z() << " " << sp.radius << " " << sp.label << " "
        << int(sp.color.r) << " " << int(sp.color.g) << " " << int(sp.color.b)
        << "\n";
  out << "light " << s.light.x() << " " << s.light.y() << " " << s.light.z()
      << "\n";
  out << "checker " << (s.checker ? "on" : "off") << "\n";
  return out.str();
}

std::string Scene::palette_text() const {
  std::ostringstream out;
  for (int f = 0; f < 6; ++f)
    out << kFaceLabels[f] << " " << int(kFaceColors[f].r) << " "
        << int(kFaceColors[f].g) << " " << int(kFaceColors[f].b) << "\n";
  for (const auto& b : boxes)
    out << b.label << " " << int(b.color.r) << " " << int(b.color.g) << " "
        << int(b.color.b) << "\n";
  for (const auto& s : spheres)
    out << s.label << " " << int(s.color.r) << " " << int(s.color.g) << " "
        << int(s.color.b) << "\n";
  return out.str();
}

Scene reference_scene() {
  return parse_scene_text(
      "room 2 2 2\n"
      "sphere 0.5 0 0 0.25 ball 220 120 30\n"
      "box -0.45 0.5 -0.6 0.4 0.3 0.8 crate 30 180 200\n"
      "light 0.3 -0.5 0.8\n"
      "checker on\n");
}

const char* mode_name(RenderMode m) {
  switch (m) {
    case RenderMode::Lit: return "lit";
    case RenderMode::Semantic: return "semantic";
    case RenderMode::Depth: return "depth";
  }
  return "?";
}

}  // namespace omnisynth::env
