#pragma once

#include <string>
#include <variant>
#include <vector>

#include "omnisynth/central.hpp"
#include "omnisynth/noncentral.hpp"
#include "omnisynth/scene.hpp"

namespace omnisynth::gt {

using AnyModel = std::variant<central::CentralModel, nc::NonCentralModel>;

// Binary supervision maps for room-layout recovery. Edges cover the 12
// wall/floor/ceiling intersection segments, corners the 8 room corners; both
// are dilated by a disc. The maps are pure projections of the room shell:
// objects inside the room do not occlude them.
struct LayoutGT {
  env::ImageMask edges;
  env::ImageMask corners;
  // Sub-pixel image positions of the corners that project into the grid,
  // paired with their world positions.
  std::vector<geo::Vec2> corner_px;
  std::vector<geo::Vec3> corner_world;
};

// 4 px at 1024-wide images, scaling linearly with width, never below 1.
int default_layout_dilation(int width);

// Central models only (throws std::invalid_argument for anything else via
// the caller's dispatch; this signature admits only central models).
LayoutGT layout_gt(const env::Scene& scene, const central::CentralModel& model,
                   const central::ImageGrid& grid, const geo::Pose& pose,
                   int dilation_px = 0);  // 0 -> default_layout_dilation

struct LayoutMetrics {
  double iou = 0, acc = 0, p = 0, r = 0, f1 = 0;
};

// Pixelwise comparison of binary maps (nonzero = positive). Two empty maps
// count as a perfect match. Throws std::invalid_argument on size mismatch.
LayoutMetrics layout_metrics(const env::ImageMask& pred,
                             const env::ImageMask& gt);

// Header line "IoU,Acc,P,R,F1" plus one fixed-order value row.
std::string layout_metrics_csv(const LayoutMetrics& m);

// One trajectory frame. The quaternion is camera-to-world, Hamilton
// convention, serialized with w last.
struct TrajectoryRecord {
  long id = 0;
  geo::Vec3 t = geo::Vec3::Zero();
  geo::Quat q = geo::Quat::Identity();
};

geo::Pose record_pose(const TrajectoryRecord& rec);
TrajectoryRecord make_record(long id, const geo::Pose& pose);

// Text format, one frame per line: "id tx ty tz qx qy qz qw". '#' starts a
// comment. Frame ids must increase strictly; violations throw.
std::vector<TrajectoryRecord> load_trajectory(const std::string& path);
void save_trajectory(const std::string& path,
                     const std::vector<TrajectoryRecord>& recs);

struct TrajErrorRow {
  long id = 0;
  double eps_t_deg = 0.0;      // angle between translation directions
  double eps_theta_deg = 0.0;  // relative rotation angle
  bool t_valid = true;         // false when either translation has zero norm
};

// Frames are matched by id; frames missing on either side are dropped.
// Angles come from atan2 forms, so identical inputs give exactly zero and
// scaling a translation never changes eps_t.
std::vector<TrajErrorRow> trajectory_errors(
    const std::vector<TrajectoryRecord>& gt,
    const std::vector<TrajectoryRecord>& est);

struct SequenceOptions {
  std::vector<env::RenderMode> modes{env::RenderMode::Lit};
  std::string outdir = ".";
  std::string prefix = "frame";
  int workers = 0;
  bool depth_preview = true;
  // > 0 renders central models through a cube map of this face resolution.
  int cube_face_res = 0;
};

// Renders every trajectory frame in every requested mode and writes the
// trajectory file alongside. Returns the file names written, relative to
// opts.outdir, in deterministic order.
std::vector<std::string> sequence_generate(
    const env::EnvironmentOracle& oracle, const AnyModel& model,
    const central::ImageGrid& grid,
    const std::vector<TrajectoryRecord>& trajectory,
    const SequenceOptions& opts);

}  // namespace omnisynth::gt
