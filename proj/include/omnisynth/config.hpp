#pragma once

#include <map>
#include <string>
#include <vector>

#include "omnisynth/image.hpp"

namespace omnisynth::cli {

// One render job as described by a config file. Camera parameters stay as
// raw strings (validated and converted by the catalog); angles in the file
// are degrees.
struct JobConfig {
  // [scene]
  std::string scene_file;      // empty = built-in reference room
  std::string cubemap_prefix;  // render from ingested cube maps instead

  // [camera]
  std::string model = "equirect";
  std::map<std::string, std::string> camera_params;
  int width = 0, height = 0;  // 0 = model default

  // [pose]
  double x = 0, y = 0, z = 0;
  double yaw_deg = 0, pitch_deg = 0, roll_deg = 0;
  std::string trajectory_file;  // overrides the single pose when set

  // [output]
  std::string outdir = "out";
  std::string prefix = "frame";
  std::vector<env::RenderMode> modes{env::RenderMode::Lit};
  bool layout_maps = false;   // room edge/corner ground truth (central only)
  int layout_dilation = 0;    // 0 = width-scaled default
  bool depth_preview = true;
  bool group_centers = false;  // per-frame optical-center sidecar (non-central)
  int cube_face_res = 0;       // 0 = direct ray casting
  int workers = 0;             // 0 = OMNISYNTH_WORKERS env var or hardware

  bool operator==(const JobConfig&) const = default;
};

struct ConfigResult {
  JobConfig config;
  // Fully collected (not fail-fast), each "line N: message".
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

// Parses the INI-style format: [scene] [camera] [pose] [output] sections,
// key = value lines, '#' comments. Validates everything it can, including
// camera parameters against the model catalog.
ConfigResult parse_config(const std::string& text);
ConfigResult load_config(const std::string& path);

// Canonical text form; parse_config(serialize_config(c)).config == c.
std::string serialize_config(const JobConfig& cfg);

}  // namespace omnisynth::cli
