#include "omnisynth/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "omnisynth/catalog.hpp"

namespace omnisynth::cli {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct Parser {
  ConfigResult out;
  // Source line of each camera parameter so catalog errors can point home.
  std::map<std::string, int> camera_key_line;
  int model_line = 0;

  void err(int line, const std::string& msg) {
    out.errors.push_back("line " + std::to_string(line) + ": " + msg);
  }

  bool parse_double(int line, const std::string& key, const std::string& val, double* dst) {
    char* end = nullptr;
    double v = std::strtod(val.c_str(), &end);
    if (end == val.c_str() || *end != '\0') {
      err(line, key + ": expected a number, got '" + val + "'");
      return false;
    }
    *dst = v;
    return true;
  }

  bool parse_int(int line, const std::string& key, const std::string& val, int* dst) {
    char* end = nullptr;
    long v = std::strtol(val.c_str(), &end, 10);
    if (end == val.c_str() || *end != '\0') {
      err(line, key + ": expected an integer, got '" + val + "'");
      return false;
    }
    *dst = static_cast<int>(v);
    return true;
  }

  bool parse_bool(int line, const std::string& key, const std::string& val, bool* dst) {
    std::string v = lower(val);
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
      *dst = true;
    } else if (v == "false" || v == "0" || v == "no" || v == "off") {
      *dst = false;
    } else {
      err(line, key + ": expected true/false, got '" + val + "'");
      return false;
    }
    return true;
  }

  void parse_modes(int line, const std::string& val) {
    std::vector<env::RenderMode> modes;
    std::stringstream ss(val);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::string m = lower(trim(item));
      if (m == "lit") {
        modes.push_back(env::RenderMode::Lit);
      } else if (m == "semantic") {
        modes.push_back(env::RenderMode::Semantic);
      } else if (m == "depth") {
        modes.push_back(env::RenderMode::Depth);
      } else {
        err(line, "modes: unknown mode '" + m + "' (expected lit, semantic, depth)");
      }
    }
    if (!modes.empty()) out.config.modes = modes;
  }

  void key_scene(int line, const std::string& key, const std::string& val) {
    if (key == "scene") {
      out.config.scene_file = val;
    } else if (key == "cubemap") {
      out.config.cubemap_prefix = val;
    } else {
      err(line, "unknown key '" + key + "' in [scene]");
    }
  }

  void key_camera(int line, const std::string& key, const std::string& val) {
    if (key == "model") {
      out.config.model = val;
      model_line = line;
    } else if (key == "width") {
      parse_int(line, key, val, &out.config.width);
    } else if (key == "height") {
      parse_int(line, key, val, &out.config.height);
    } else {
      out.config.camera_params[key] = val;
      camera_key_line[key] = line;
    }
  }

  void key_pose(int line, const std::string& key, const std::string& val) {
    if (key == "x") {
      parse_double(line, key, val, &out.config.x);
    } else if (key == "y") {
      parse_double(line, key, val, &out.config.y);
    } else if (key == "z") {
      parse_double(line, key, val, &out.config.z);
    } else if (key == "yaw") {
      parse_double(line, key, val, &out.config.yaw_deg);
    } else if (key == "pitch") {
      parse_double(line, key, val, &out.config.pitch_deg);
    } else if (key == "roll") {
      parse_double(line, key, val, &out.config.roll_deg);
    } else if (key == "trajectory") {
      out.config.trajectory_file = val;
    } else {
      err(line, "unknown key '" + key + "' in [pose]");
    }
  }

  void key_output(int line, const std::string& key, const std::string& val) {
    if (key == "dir") {
      out.config.outdir = val;
    } else if (key == "prefix") {
      out.config.prefix = val;
    } else if (key == "modes") {
      parse_modes(line, val);
    } else if (key == "layout_maps") {
      parse_bool(line, key, val, &out.config.layout_maps);
    } else if (key == "layout_dilation") {
      parse_int(line, key, val, &out.config.layout_dilation);
    } else if (key == "depth_preview") {
      parse_bool(line, key, val, &out.config.depth_preview);
    } else if (key == "group_centers") {
      parse_bool(line, key, val, &out.config.group_centers);
    } else if (key == "cube_face_res") {
      parse_int(line, key, val, &out.config.cube_face_res);
    } else if (key == "workers") {
      parse_int(line, key, val, &out.config.workers);
    } else {
      err(line, "unknown key '" + key + "' in [output]");
    }
  }

  void run(const std::string& text) {
    std::stringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string s = raw;
      size_t hash = s.find('#');
      if (hash != std::string::npos) s = s.substr(0, hash);
      s = trim(s);
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') {
          err(line, "malformed section header '" + s + "'");
          continue;
        }
        section = lower(trim(s.substr(1, s.size() - 2)));
        if (section != "scene" && section != "camera" && section != "pose" &&
            section != "output") {
          err(line, "unknown section [" + section + "]");
          section.clear();
        }
        continue;
      }
      size_t eq = s.find('=');
      if (eq == std::string::npos) {
        err(line, "expected 'key = value', got '" + s + "'");
        continue;
      }
      std::string key = lower(trim(s.substr(0, eq)));
      std::string val = trim(s.substr(eq + 1));
      if (key.empty()) {
        err(line, "missing key before '='");
        continue;
      }
      if (section.empty()) {
        err(line, "key '" + key + "' outside any [section]");
      } else if (section == "scene") {
        key_scene(line, key, val);
      } else if (section == "camera") {
        key_camera(line, key, val);
      } else if (section == "pose") {
        key_pose(line, key, val);
      } else {
        key_output(line, key, val);
      }
    }
    validate(line);
  }

  void validate(int last_line) {
    JobConfig& c = out.config;
    int build_w = c.width, build_h = c.height;
    if (c.width < 0) {
      err(camera_line(last_line), "width must be positive");
      build_w = 0;
    }
    if (c.height < 0) {
      err(camera_line(last_line), "height must be positive");
      build_h = 0;
    }
    if (c.layout_dilation < 0) err(last_line, "layout_dilation must be >= 0");
    if (c.cube_face_res < 0) err(last_line, "cube_face_res must be >= 0");
    if (c.workers < 0) err(last_line, "workers must be >= 0");
    if (!c.scene_file.empty() && !c.cubemap_prefix.empty())
      err(last_line, "[scene] sets both 'scene' and 'cubemap'; pick one");

    auto built = cli::build_model(c.model, c.camera_params, build_w, build_h);
    for (const auto& [key, msg] : built.errors) {
      auto it = camera_key_line.find(key);
      int line = it != camera_key_line.end() ? it->second
                 : model_line > 0           ? model_line
                                            : last_line;
      err(line, key.empty() ? msg : key + ": " + msg);
    }
    if (built.ok() && c.layout_maps && !built.is_central)
      err(last_line, "layout_maps requires a central projection model");
  }

  int camera_line(int fallback) const { return model_line > 0 ? model_line : fallback; }
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ConfigResult parse_config(const std::string& text) {
  Parser p;
  p.run(text);
  return p.out;
}

ConfigResult load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ConfigResult r;
    r.errors.push_back("cannot open config file '" + path + "'");
    return r;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const JobConfig& cfg) {
  std::ostringstream o;
  o << "[scene]\n";
  if (!cfg.scene_file.empty()) o << "scene = " << cfg.scene_file << "\n";
  if (!cfg.cubemap_prefix.empty()) o << "cubemap = " << cfg.cubemap_prefix << "\n";
  o << "\n[camera]\n";
  o << "model = " << cfg.model << "\n";
  if (cfg.width > 0) o << "width = " << cfg.width << "\n";
  if (cfg.height > 0) o << "height = " << cfg.height << "\n";
  for (const auto& [k, v] : cfg.camera_params) o << k << " = " << v << "\n";
  o << "\n[pose]\n";
  o << "x = " << fmt_double(cfg.x) << "\n";
  o << "y = " << fmt_double(cfg.y) << "\n";
  o << "z = " << fmt_double(cfg.z) << "\n";
  o << "yaw = " << fmt_double(cfg.yaw_deg) << "\n";
  o << "pitch = " << fmt_double(cfg.pitch_deg) << "\n";
  o << "roll = " << fmt_double(cfg.roll_deg) << "\n";
  if (!cfg.trajectory_file.empty()) o << "trajectory = " << cfg.trajectory_file << "\n";
  o << "\n[output]\n";
  o << "dir = " << cfg.outdir << "\n";
  o << "prefix = " << cfg.prefix << "\n";
  o << "modes = ";
  for (size_t i = 0; i < cfg.modes.size(); ++i) {
    if (i) o << ",";
    o << env::mode_name(cfg.modes[i]);
  }
  o << "\n";
  o << "layout_maps = " << (cfg.layout_maps ? "true" : "false") << "\n";
  if (cfg.layout_dilation > 0) o << "layout_dilation = " << cfg.layout_dilation << "\n";
  o << "depth_preview = " << (cfg.depth_preview ? "true" : "false") << "\n";
  o << "group_centers = " << (cfg.group_centers ? "true" : "false") << "\n";
  if (cfg.cube_face_res > 0) o << "cube_face_res = " << cfg.cube_face_res << "\n";
  if (cfg.workers > 0) o << "workers = " << cfg.workers << "\n";
  return o.str();
}

}  // namespace omnisynth::cli
