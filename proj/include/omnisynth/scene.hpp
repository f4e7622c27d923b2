#pragma once

#include <string>
#include <vector>

#include "omnisynth/geometry.hpp"
#include "omnisynth/image.hpp"

namespace omnisynth::env {

using geo::Vec3;

// One answer to "what is along this ray": shaded color, semantic label with
// its palette color, and Euclidean distance from the ray origin to the hit.
// The label id is the packed palette color, so label equality and palette
// color equality coincide.
struct RaySample {
  Rgb8 color{};        // shaded (lit) color
  Rgb8 label_color{};  // flat palette color of the hit entity
  uint32_t label = 0;  // pack_rgb(label_color)
  double depth = 0.0;  // meters along the ray
};

struct SceneBox {
  Vec3 center = Vec3::Zero();
  Vec3 half = Vec3::Zero();  // half extents
  std::string label;
  Rgb8 color{};
};

struct SceneSphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  std::string label;
  Rgb8 color{};
};

// Closed axis-aligned room centered at the origin with optional boxes and
// spheres inside. X spans the width, Y the depth, Z the height.
struct Scene {
  double width = 2.0, depth = 2.0, height = 2.0;
  std::vector<SceneBox> boxes;
  std::vector<SceneSphere> spheres;
  Vec3 light = Vec3(0.3, -0.5, 0.8).normalized();  // direction toward the light
  bool checker = true;

  Vec3 room_half() const { return {width / 2, depth / 2, height / 2}; }
  bool inside_room(const Vec3& p, double margin = 0.0) const;

  // Emits one line per known label: "name r g b".
  std::string palette_text() const;
};

// Fixed palette for the six room faces, in +X,-X,+Y,-Y,floor,ceiling order.
Rgb8 room_face_color(int face);
const char* room_face_label(int face);

// Casts a ray from strictly inside the room and returns the nearest hit.
// Total: a closed room guarantees a hit. Throws std::domain_error if the
// origin is outside the room.
RaySample scene_cast(const Scene& scene, const Vec3& origin, const Vec3& dir);

// Line-oriented scene description: room W D H | box cx cy cz sx sy sz label
// r g b | sphere cx cy cz radius label r g b | light lx ly lz | checker
// on|off. '#' starts a comment. Throws std::runtime_error with the line
// number on malformed input.
Scene parse_scene_text(const std::string& text);
Scene load_scene_file(const std::string& path);
std::string scene_to_text(const Scene& scene);

// The scene used by the test and acceptance suites: a 2x2x2 m room with one
// sphere and one box.
Scene reference_scene();

}  // namespace omnisynth::env
