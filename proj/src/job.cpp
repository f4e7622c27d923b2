#include "omnisynth/job.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "json.hpp"
#include "omnisynth/catalog.hpp"
#include "omnisynth/groundtruth.hpp"
#include "omnisynth/png_io.hpp"

namespace omnisynth::cli {

namespace fs = std::filesystem;

uint64_t fnv1a64(const void* data, size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 14695981039346656037ULL;
  for (size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash missing file: " + path);
  uint64_t h = 14695981039346656037ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::string hex16(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

std::string frame_tag(const std::string& prefix, long id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04ld_", id);
  return prefix + buf;
}

// The oracle plus whatever owns its backing data.
struct OracleSetup {
  std::unique_ptr<env::EnvironmentOracle> oracle;
  const env::Scene* scene = nullptr;  // set when scene-backed
};

OracleSetup make_oracle(const JobConfig& cfg, JobResult& res) {
  OracleSetup out;
  if (!cfg.cubemap_prefix.empty()) {
    auto cmo = std::make_unique<env::CubeMapOracle>();
    for (const env::RenderMode mode : cfg.modes) {
      const std::string prefix =
          cfg.cubemap_prefix + "_" + env::mode_name(mode);
      try {
        cmo->put(env::load_cubemap(prefix));
      } catch (const std::exception& e) {
        res.errors.push_back(std::string("cube map for mode '") +
                             env::mode_name(mode) + "': " + e.what());
      }
    }
    out.oracle = std::move(cmo);
    return out;
  }
  env::Scene scene;
  if (cfg.scene_file.empty()) {
    scene = env::reference_scene();
  } else {
    try {
      scene = env::load_scene_file(cfg.scene_file);
    } catch (const std::exception& e) {
      res.errors.push_back(e.what());
      return out;
    }
  }
  auto so = std::make_unique<env::SceneOracle>(std::move(scene));
  out.scene = &so->scene();
  out.oracle = std::move(so);
  return out;
}

void write_group_centers(const std::string& path, long frame_id,
                         const std::vector<nc::PixelGroup>& groups,
                         const geo::Pose& pose) {
  nlohmann::json doc;
  doc["frame"] = frame_id;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& g : groups) {
    nlohmann::json item;
    item["key"] = g.key;
    item["valid"] = g.valid;
    if (g.valid) {
      const geo::Vec3 w = pose.position + pose.orientation * g.center;
      item["center"] = {w.x(), w.y(), w.z()};
      item["pixels"] = g.pixels.size();
    }
    arr.push_back(std::move(item));
  }
  doc["groups"] = std::move(arr);
  std::ofstream o(path);
  if (!o) throw std::runtime_error("cannot write " + path);
  o << doc.dump(2) << "\n";
}

}  // namespace

JobResult run_job(const JobConfig& cfg) {
  JobResult res;
  if (cfg.modes.empty()) {
    res.errors.push_back("no render modes selected");
    return res;
  }

  BuildResult built =
      build_model(cfg.model, cfg.camera_params, cfg.width, cfg.height);
  for (const auto& [key, msg] : built.errors) res.errors.push_back(msg);
  if (!res.errors.empty()) return res;

  OracleSetup env = make_oracle(cfg, res);
  if (!res.errors.empty() || !env.oracle) return res;
  if (!built.is_central && !env.oracle->movable()) {
    res.errors.push_back(
        "model '" + cfg.model +
        "' is non-central and needs a scene; a fixed cube map cannot supply "
        "per-group viewpoints");
    return res;
  }
  if (cfg.layout_maps && !env.scene) {
    res.errors.push_back("layout_maps needs a scene-backed job");
    return res;
  }

  std::vector<gt::TrajectoryRecord> trajectory;
  if (!cfg.trajectory_file.empty()) {
    try {
      trajectory = gt::load_trajectory(cfg.trajectory_file);
    } catch (const std::exception& e) {
      res.errors.push_back(e.what());
      return res;
    }
  } else {
    const geo::Pose pose{
        geo::Vec3(cfg.x, cfg.y, cfg.z),
        geo::yaw_pitch_roll(geo::deg2rad(cfg.yaw_deg),
                            geo::deg2rad(cfg.pitch_deg),
                            geo::deg2rad(cfg.roll_deg))};
    trajectory.push_back(gt::make_record(0, pose));
  }
  if (trajectory.empty()) {
    res.errors.push_back("trajectory '" + cfg.trajectory_file + "' is empty");
    return res;
  }

  gt::SequenceOptions sopts;
  sopts.modes = cfg.modes;
  sopts.outdir = cfg.outdir;
  sopts.prefix = cfg.prefix;
  sopts.workers = cfg.workers;
  sopts.depth_preview = cfg.depth_preview;
  sopts.cube_face_res = cfg.cube_face_res;

  try {
    res.artifacts =
        gt::sequence_generate(*env.oracle, built.model, built.grid, trajectory,
                              sopts);

    if (cfg.layout_maps) {
      const auto* central = std::get_if<central::CentralModel>(&built.model);
      if (!central) throw std::runtime_error("layout_maps needs a central model");
      for (const auto& rec : trajectory) {
        const gt::LayoutGT gt = gt::layout_gt(*env.scene, *central, built.grid,
                                              gt::record_pose(rec),
                                              cfg.layout_dilation);
        const std::string tag = frame_tag(cfg.prefix, rec.id);
        const std::string edges = tag + "layout_edges.png";
        const std::string corners = tag + "layout_corners.png";
        env::write_png_mask((fs::path(cfg.outdir) / edges).string(), gt.edges);
        env::write_png_mask((fs::path(cfg.outdir) / corners).string(),
                            gt.corners);
        res.artifacts.push_back(edges);
        res.artifacts.push_back(corners);
      }
    }

    if (cfg.group_centers) {
      if (const auto* ncm = std::get_if<nc::NonCentralModel>(&built.model)) {
        const auto groups = nc::enumerate_groups(*ncm, built.grid);
        for (const auto& rec : trajectory) {
          const std::string rel = frame_tag(cfg.prefix, rec.id) + "groups.json";
          write_group_centers((fs::path(cfg.outdir) / rel).string(), rec.id,
                              groups, gt::record_pose(rec));
          res.artifacts.push_back(rel);
        }
      }
    }
  } catch (const std::exception& e) {
    res.errors.push_back(e.what());
    return res;
  }

  std::sort(res.artifacts.begin(), res.artifacts.end());
  nlohmann::json manifest;
  manifest["model"] = cfg.model;
  nlohmann::json arr = nlohmann::json::array();
  for (const std::string& rel : res.artifacts) {
    nlohmann::json item;
    item["path"] = rel;
    item["fnv1a64"] = hex16(fnv1a64_file((fs::path(cfg.outdir) / rel).string()));
    arr.push_back(std::move(item));
  }
  manifest["artifacts"] = std::move(arr);
  res.manifest_path = (fs::path(cfg.outdir) / "manifest.json").string();
  std::ofstream mo(res.manifest_path, std::ios::binary);
  if (!mo) {
    res.errors.push_back("cannot write " + res.manifest_path);
    return res;
  }
  mo << manifest.dump(2) << "\n";
  res.ok = true;
  return res;
}

}  // namespace omnisynth::cli
