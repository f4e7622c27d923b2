#include "omnisynth/groundtruth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "omnisynth/depth_io.hpp"
#include "omnisynth/png_io.hpp"

namespace omnisynth::gt {

using central::CentralModel;
using central::ImageGrid;
using geo::Mat3;
using geo::Quat;
using geo::Vec2;
using geo::Vec3;

int default_layout_dilation(int width) {
  return std::max(1, int(std::lround(4.0 * width / 1024.0)));
}

namespace {

bool wraps_horizontally(const CentralModel& model) {
  if (std::holds_alternative<central::Equirect>(model)) return true;
  if (const auto* cyl = std::get_if<central::Cylindrical>(&model))
    return cyl->fov_h >= 2.0 * geo::kPi - 1e-12;
  return false;
}

double pixel_distance(const Vec2& a, const Vec2& b, bool wrap_u, int u_max) {
  double du = std::abs(a.x() - b.x());
  if (wrap_u) du = std::min(du, u_max - du);
  return std::hypot(du, a.y() - b.y());
}

struct Stamper {
  env::ImageMask& mask;
  bool wrap_u;

  void point(double x, double y) {
    int i = int(std::floor(x));
    const int j = int(std::floor(y));
    if (j < 0 || j >= mask.height()) return;
    if (wrap_u) {
      i %= mask.width();
      if (i < 0) i += mask.width();
    } else if (i < 0 || i >= mask.width()) {
      return;
    }
    mask.at(i, j) = 255;
  }

  void disc(double x, double y, int radius) {
    for (int dj = -radius; dj <= radius; ++dj)
      for (int di = -radius; di <= radius; ++di)
        if (di * di + dj * dj <= radius * radius)
          point(x + di, y + dj);
  }
};

class EdgeProjector {
 public:
  EdgeProjector(const CentralModel& model, const ImageGrid& grid,
                const geo::Pose& pose)
      : model_(model), grid_(grid), pose_(pose),
        wrap_(wraps_horizontally(model)) {}

  std::optional<Vec2> project(const Vec3& world) const {
    const Vec3 rel = world - pose_.position;
    if (rel.squaredNorm() < 1e-24) return std::nullopt;
    const Vec3 cam = pose_.orientation.transpose() * rel;
    return central::forward_project(model_, grid_, cam.normalized());
  }

  // Walks the segment a-b, splitting until consecutive projections are at
  // most a quarter pixel apart, and stamps every projected sample.
  void trace(const Vec3& a, const Vec3& b, Stamper& stamp) const {
    const auto pa = project(a), pb = project(b);
    if (pa) stamp.point(pa->x(), pa->y());
    if (pb) stamp.point(pb->x(), pb->y());
    subdivide(a, pa, b, pb, stamp, 0);
  }

  bool wrap() const { return wrap_; }

 private:
  void subdivide(const Vec3& a, const std::optional<Vec2>& pa, const Vec3& b,
                 const std::optional<Vec2>& pb, Stamper& stamp,
                 int depth) const {
    if (depth > 28) return;
    if (pa && pb &&
        pixel_distance(*pa, *pb, wrap_, grid_.u_max) <= 0.25)
      return;
    // Keep refining near field-of-view boundaries even when only one side
    // projects, but stop once the 3D step is negligible.
    if (!pa && !pb && depth > 8) return;
    if ((a - b).squaredNorm() < 1e-20) return;
    const Vec3 mid = 0.5 * (a + b);
    const auto pm = project(mid);
    if (pm) stamp.point(pm->x(), pm->y());
    subdivide(a, pa, mid, pm, stamp, depth + 1);
    subdivide(mid, pm, b, pb, stamp, depth + 1);
  }

  const CentralModel& model_;
  const ImageGrid& grid_;
  const geo::Pose& pose_;
  bool wrap_;
};

void dilate(env::ImageMask& mask, int radius, bool wrap_u) {
  if (radius <= 0) return;
  std::vector<std::pair<int, int>> on;
  for (int j = 0; j < mask.height(); ++j)
    for (int i = 0; i < mask.width(); ++i)
      if (mask.at(i, j)) on.push_back({i, j});
  Stamper stamp{mask, wrap_u};
  for (const auto& [i, j] : on) stamp.disc(i, j, radius);
}

}  // namespace

LayoutGT layout_gt(const env::Scene& scene, const CentralModel& model,
                   const ImageGrid& grid, const geo::Pose& pose,
                   int dilation_px) {
  if (!scene.inside_room(pose.position))
    throw std::domain_error("layout_gt: camera must be inside the room");
  const int radius =
      dilation_px > 0 ? dilation_px : default_layout_dilation(grid.u_max);

  LayoutGT out;
  out.edges = env::ImageMask(grid.u_max, grid.v_max, 0);
  out.corners = env::ImageMask(grid.u_max, grid.v_max, 0);

  const Vec3 h = scene.room_half();
  Vec3 corners[8];
  for (int k = 0; k < 8; ++k)
    corners[k] = Vec3((k & 1) ? h.x() : -h.x(), (k & 2) ? h.y() : -h.y(),
                      (k & 4) ? h.z() : -h.z());

  const EdgeProjector proj(model, grid, pose);
  Stamper edge_stamp{out.edges, proj.wrap()};
  // The 12 edges connect corner pairs whose indices differ in exactly one
  // bit of the (x, y, z) sign code.
  for (int k = 0; k < 8; ++k)
    for (int bit = 0; bit < 3; ++bit)
      if (!(k & (1 << bit)))
        proj.trace(corners[k], corners[k | (1 << bit)], edge_stamp);
  dilate(out.edges, radius, proj.wrap());

  Stamper corner_stamp{out.corners, proj.wrap()};
  for (const Vec3& c : corners) {
    const auto px = proj.project(c);
    if (!px) continue;
    out.corner_px.push_back(*px);
    out.corner_world.push_back(c);
    corner_stamp.disc(px->x(), px->y(), radius);
  }
  return out;
}

LayoutMetrics layout_metrics(const env::ImageMask& pred,
                             const env::ImageMask& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height())
    throw std::invalid_argument("layout_metrics: grid mismatch");
  long tp = 0, fp = 0, fn = 0, tn = 0;
  for (int j = 0; j < gt.height(); ++j)
    for (int i = 0; i < gt.width(); ++i) {
      const bool p = pred.at(i, j) != 0, g = gt.at(i, j) != 0;
      tp += p && g;
      fp += p && !g;
      fn += !p && g;
      tn += !p && !g;
    }
  LayoutMetrics m;
  const long total = tp + fp + fn + tn;
  m.acc = total > 0 ? double(tp + tn) / total : 1.0;
  if (tp + fp + fn == 0) {  // both maps empty: perfect agreement
    m.iou = m.p = m.r = m.f1 = 1.0;
    return m;
  }
  m.iou = double(tp) / double(tp + fp + fn);
  m.p = (tp + fp) > 0 ? double(tp) / double(tp + fp) : 0.0;
  m.r = (tp + fn) > 0 ? double(tp) / double(tp + fn) : 0.0;
  m.f1 = (m.p + m.r) > 0 ? 2.0 * m.p * m.r / (m.p + m.r) : 0.0;
  return m;
}

std::string layout_metrics_csv(const LayoutMetrics& m) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "IoU,Acc,P,R,F1\n%.6f,%.6f,%.6f,%.6f,%.6f\n",
                m.iou, m.acc, m.p, m.r, m.f1);
  return buf;
}

geo::Pose record_pose(const TrajectoryRecord& rec) {
  return {rec.t, rec.q.normalized().toRotationMatrix()};
}

TrajectoryRecord make_record(long id, const geo::Pose& pose) {
  Quat q(pose.orientation);
  q.normalize();
  if (q.w() < 0) q.coeffs() = -q.coeffs();  // canonical sign for determinism
  return {id, pose.position, q};
}

std::vector<TrajectoryRecord> load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory: " + path);
  std::vector<TrajectoryRecord> recs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    TrajectoryRecord r;
    double qx, qy, qz, qw;
    if (!(ss >> r.id)) continue;  // blank line
    if (!(ss >> r.t.x() >> r.t.y() >> r.t.z() >> qx >> qy >> qz >> qw))
      throw std::runtime_error("trajectory " + path + " line " +
                               std::to_string(line_no) +
                               ": expected 'id tx ty tz qx qy qz qw'");
    r.q = Quat(qw, qx, qy, qz);
    if (!recs.empty() && r.id <= recs.back().id)
      throw std::runtime_error("trajectory " + path + " line " +
                               std::to_string(line_no) +
                               ": frame ids must increase");
    recs.push_back(r);
  }
  return recs;
}

void save_trajectory(const std::string& path,
                     const std::vector<TrajectoryRecord>& recs) {
  for (size_t k = 1; k < recs.size(); ++k)
    if (recs[k].id <= recs[k - 1].id)
      throw std::invalid_argument("save_trajectory: frame ids must increase");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory: " + path);
  out.precision(17);
  for (const auto& r : recs)
    out << r.id << " " << r.t.x() << " " << r.t.y() << " " << r.t.z() << " "
        << r.q.x() << " " << r.q.y() << " " << r.q.z() << " " << r.q.w()
        << "\n";
}

std::vector<TrajErrorRow> trajectory_errors(
    const std::vector<TrajectoryRecord>& gt,
    const std::vector<TrajectoryRecord>& est) {
  std::map<long, const TrajectoryRecord*> by_id;
  for (const auto& r : est) by_id[r.id] = &r;
  std::vector<TrajErrorRow> rows;
  for (const auto& g : gt) {
    const auto it = by_id.find(g.id);
    if (it == by_id.end()) continue;
    const TrajectoryRecord& e = *it->second;
    TrajErrorRow row;
    row.id = g.id;

    if (g.t.norm() == 0.0 || e.t.norm() == 0.0) {
      row.t_valid = false;
      row.eps_t_deg = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.eps_t_deg =
          geo::rad2deg(std::atan2(g.t.cross(e.t).norm(), g.t.dot(e.t)));
    }

    // Relative rotation as a quaternion: for identical inputs every vector
    // component cancels term by term, so the angle is exactly zero.
    const geo::Quat rel = g.q.normalized() * e.q.normalized().conjugate();
    row.eps_theta_deg =
        geo::rad2deg(2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w())));
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string frame_name(const std::string& prefix, long id,
                       const std::string& suffix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04ld_", id);
  return prefix + buf + suffix;
}

}  // namespace

std::vector<std::string> sequence_generate(
    const env::EnvironmentOracle& oracle, const AnyModel& model,
    const ImageGrid& grid, const std::vector<TrajectoryRecord>& trajectory,
    const SequenceOptions& opts) {
  namespace fs = std::filesystem;
  fs::create_directories(opts.outdir);
  std::vector<std::string> written;
  auto out_path = [&](const std::string& rel) {
    return (fs::path(opts.outdir) / rel).string();
  };

  for (const auto& rec : trajectory) {
    const geo::Pose pose = record_pose(rec);
    for (const env::RenderMode mode : opts.modes) {
      env::RenderOutput frame;
      if (const auto* cm = std::get_if<CentralModel>(&model)) {
        central::CentralRenderOptions copts;
        copts.workers = opts.workers;
        if (opts.cube_face_res > 0) {
          copts.path = central::SamplePath::ViaCubeMap;
          copts.cube_face_res = opts.cube_face_res;
        }
        frame = central::compose_central(*cm, grid, pose, mode, oracle, copts);
      } else {
        nc::NCRenderOptions nopts;
        nopts.workers = opts.workers;
        frame = nc::compose_noncentral(std::get<nc::NonCentralModel>(model),
                                       grid, pose, mode, oracle, nopts);
      }
      if (mode == env::RenderMode::Depth) {
        const std::string raw = frame_name(opts.prefix, rec.id, "depth.raw");
        env::write_depth_raw(out_path(raw), frame.depth);
        written.push_back(raw);
        if (opts.depth_preview) {
          const std::string prev =
              frame_name(opts.prefix, rec.id, "depth_preview.png");
          const std::string scale = prev + ".scale.txt";
          env::write_depth_preview(out_path(prev), out_path(scale),
                                   frame.depth);
          written.push_back(prev);
          written.push_back(scale);
        }
      } else {
        const std::string png = frame_name(
            opts.prefix, rec.id, std::string(env::mode_name(mode)) + ".png");
        env::write_png(out_path(png), frame.color);
        written.push_back(png);
      }
    }
  }
  const std::string traj = opts.prefix + "_trajectory.txt";
  save_trajectory(out_path(traj), trajectory);
  written.push_back(traj);
  return written;
}

}  // namespace omnisynth::gt
