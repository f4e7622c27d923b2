#include <cmath>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "omnisynth/catalog.hpp"
#include "omnisynth/groundtruth.hpp"
#include "omnisynth/job.hpp"
#include "omnisynth/png_io.hpp"

namespace {

int cmd_render(const std::string& config_path, int workers_override) {
  omnisynth::cli::ConfigResult cr = omnisynth::cli::load_config(config_path);
  if (!cr.ok()) {
    for (const std::string& e : cr.errors)
      std::cerr << config_path << ": " << e << "\n";
    return 2;
  }
  if (workers_override > 0) cr.config.workers = workers_override;
  omnisynth::cli::JobResult jr = omnisynth::cli::run_job(cr.config);
  if (!jr.ok) {
    for (const std::string& e : jr.errors) std::cerr << "error: " << e << "\n";
    return 1;
  }
  std::cout << jr.manifest_path << " (" << jr.artifacts.size()
            << " artifacts)\n";
  return 0;
}

int cmd_metrics(const std::string& pred_path, const std::string& gt_path) {
  const omnisynth::env::ImageMask pred = omnisynth::env::read_png_mask(pred_path);
  const omnisynth::env::ImageMask gt = omnisynth::env::read_png_mask(gt_path);
  std::cout << omnisynth::gt::layout_metrics_csv(
      omnisynth::gt::layout_metrics(pred, gt));
  return 0;
}

int cmd_traj_error(const std::string& gt_path, const std::string& est_path) {
  const auto gt = omnisynth::gt::load_trajectory(gt_path);
  const auto est = omnisynth::gt::load_trajectory(est_path);
  const auto rows = omnisynth::gt::trajectory_errors(gt, est);
  if (rows.empty()) {
    std::cerr << "no frame ids in common\n";
    return 1;
  }
  std::printf("id,translation_error_deg,rotation_error_deg\n");
  double sum_t = 0, sum_r = 0;
  long n_t = 0;
  for (const auto& row : rows) {
    if (row.t_valid) {
      std::printf("%ld,%.12g,%.12g\n", row.id, row.eps_t_deg,
                  row.eps_theta_deg);
      sum_t += row.eps_t_deg;
      ++n_t;
    } else {
      std::printf("%ld,nan,%.12g\n", row.id, row.eps_theta_deg);
      std::cerr << "frame " << row.id
                << ": zero-length translation, direction undefined\n";
    }
    sum_r += row.eps_theta_deg;
  }
  std::printf("mean,%.12g,%.12g\n", n_t > 0 ? sum_t / n_t : std::nan(""),
              sum_r / double(rows.size()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"omnisynth: omnidirectional image synthesis with ground truth"};
  app.require_subcommand(1);

  std::string config_path;
  int workers = 0;
  CLI::App* render = app.add_subcommand(
      "render", "Render a job described by a config file");
  render->add_option("config", config_path, "config file (INI format)")
      ->required();
  render->add_option("--workers", workers, "override worker thread count");

  CLI::App* models =
      app.add_subcommand("models", "List the available projection models");

  std::string pred_path, gt_path;
  CLI::App* metrics = app.add_subcommand(
      "metrics", "Compare a predicted layout mask against ground truth");
  metrics->add_option("--pred", pred_path, "predicted mask PNG")->required();
  metrics->add_option("--gt", gt_path, "ground-truth mask PNG")->required();

  std::string traj_gt, traj_est;
  CLI::App* traj = app.add_subcommand(
      "traj-error", "Per-frame angular errors between two trajectories");
  traj->add_option("--gt", traj_gt, "ground-truth trajectory file")->required();
  traj->add_option("--est", traj_est, "estimated trajectory file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (render->parsed()) return cmd_render(config_path, workers);
    if (models->parsed()) {
      std::cout << omnisynth::cli::catalog_text();
      return 0;
    }
    if (metrics->parsed()) return cmd_metrics(pred_path, gt_path);
    if (traj->parsed()) return cmd_traj_error(traj_gt, traj_est);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
