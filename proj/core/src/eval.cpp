#include "occalib/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "occalib/edge2d.hpp"
#include "occalib/rng.hpp"

namespace occalib {

AxisErrors rotation_translation_errors(const RigidTransform& est,
                                       const RigidTransform& gt) {
  const RigidTransform err = gt.inverse() * est;
  const Eigen::Matrix3d& R = err.rotation;

  // R = Rz(yaw) Ry(pitch) Rx(roll)
  const double pitch = std::asin(std::clamp(-R(2, 0), -1.0, 1.0));
  double roll, yaw;
  if (std::abs(R(2, 0)) < 1.0 - 1e-12) {
    roll = std::atan2(R(2, 1), R(2, 2));
    yaw = std::atan2(R(1, 0), R(0, 0));
  } else {
    // Gimbal lock: yaw and roll are coupled, attribute everything to roll.
    roll = std::atan2(-R(0, 1), R(1, 1));
    yaw = 0.0;
  }

  AxisErrors e;
  e.roll_deg = std::abs(rad2deg(roll));
  e.pitch_deg = std::abs(rad2deg(pitch));
  e.yaw_deg = std::abs(rad2deg(yaw));
  e.x_m = std::abs(err.translation.x());
  e.y_m = std::abs(err.translation.y());
  e.z_m = std::abs(err.translation.z());

  const double cos_theta = std::clamp((R.trace() - 1.0) * 0.5, -1.0, 1.0);
  e.total_rotation_deg = rad2deg(std::acos(cos_theta));
  e.total_translation_m = err.translation.norm();
  return e;
}

TrialData make_trial(const Scenario& scenario, int trial,
                     const Edge3DParams& edge_params) {
  const uint64_t trial_seed =
      Rng::mix(scenario.seed) ^ Rng::mix(static_cast<uint64_t>(trial) + 1);

  TrialData data;
  data.scene = build_scene(standard_scene_spec(
      Rng::mix(trial_seed ^ Rng::hash_name("scene-root"))));
  data.cam = standard_camera();
  data.gt = standard_extrinsic();

  const RigidTransform lidar_pose = standard_lidar_pose();
  const RigidTransform cam_pose = lidar_pose * data.gt.inverse();

  data.depth = render_depth(data.scene, data.cam, cam_pose);
  const PixelPairLabels labels =
      label_pixel_pairs(data.depth, edge_params.occ_threshold);
  DirectedEdgeSet2D edges = extract_edge_points_2d(labels);
  if (scenario.missing_rate > 0.0) {
    edges = apply_circle_dropout(
        edges, scenario.missing_rate,
        Rng::mix(trial_seed ^ Rng::hash_name("dropout-root")));
  }
  data.edges2d = std::move(edges);

  LidarModel model;
  if (scenario.lidar == "hdl64") {
    model = hdl64_model();
  } else if (scenario.lidar == "hdl32") {
    model = hdl32_model();
  } else {
    throw std::invalid_argument("unknown lidar preset: " + scenario.lidar);
  }
  model.sigma_r = scenario.sigma_r;
  model.sigma_alpha_deg = scenario.sigma_alpha_deg;

  data.scan = simulate_lidar(data.scene, model, lidar_pose,
                             Rng::mix(trial_seed ^ Rng::hash_name("noise-root")));

  Edge3DParams ep = edge_params;
  ep.ransac_seed = Rng::mix(trial_seed ^ Rng::hash_name("ransac-root"));
  data.features3d = extract_3d_features(data.scan, ep).features;

  data.perturbation = sample_perturbation(
      scenario.perturb_rot_deg, scenario.perturb_trans_m,
      Rng::mix(trial_seed ^ Rng::hash_name("perturb-root")));
  data.xi0 = log_map(data.gt * data.perturbation);
  return data;
}

namespace {

void strip_vertical_features(DirectedEdgeSet2D& e2, DirectedEdgeSet3D& e3) {
  e2.of(OcclusionDirection::Up).clear();
  e2.of(OcclusionDirection::Bottom).clear();
  e3.of(OcclusionDirection::Up).clear();
  e3.of(OcclusionDirection::Bottom).clear();
}

}  // namespace

ScenarioReport run_scenario(const Scenario& scenario, const CalibParams& calib,
                            const Edge3DParams& edge_params) {
  ScenarioReport report;
  report.config = scenario;

  CalibParams params = calib;
  params.direction_guided = scenario.ogm;

  double sums[6] = {0, 0, 0, 0, 0, 0};
  double total_rot = 0.0, total_trans = 0.0;

  for (int t = 0; t < scenario.trials; ++t) {
    TrialData data = make_trial(scenario, t, edge_params);
    if (!scenario.use_ub) {
      strip_vertical_features(data.edges2d, data.features3d);
    }

    const CalibrationResult result =
        calibrate(data.edges2d, data.features3d, data.cam, data.xi0, params);

    TrialResult trial;
    trial.errors = rotation_translation_errors(result.final_transform, data.gt);
    trial.status = result.status;
    trial.trace = result.trace;
    if (result.status != CalibStatus::Converged) ++report.failures;

    sums[0] += trial.errors.roll_deg;
    sums[1] += trial.errors.pitch_deg;
    sums[2] += trial.errors.yaw_deg;
    sums[3] += trial.errors.x_m;
    sums[4] += trial.errors.y_m;
    sums[5] += trial.errors.z_m;
    total_rot += trial.errors.total_rotation_deg;
    total_trans += trial.errors.total_translation_m;
    report.trials.push_back(std::move(trial));
  }

  const double n = std::max<double>(1.0, static_cast<double>(scenario.trials));
  report.mae.roll_deg = sums[0] / n;
  report.mae.pitch_deg = sums[1] / n;
  report.mae.yaw_deg = sums[2] / n;
  report.mae.x_m = sums[3] / n;
  report.mae.y_m = sums[4] / n;
  report.mae.z_m = sums[5] / n;
  report.mae.total_rotation_deg = total_rot / n;
  report.mae.total_translation_m = total_trans / n;
  return report;
}

EvalReport run_sweep(const SweepConfig& config) {
  EvalReport report;
  for (const auto& scenario : config.scenarios) {
    report.scenarios.push_back(
        run_scenario(scenario, config.calib, config.edge3d));
  }
  return report;
}

std::string format_report_table(const EvalReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %8s %8s %8s %8s %8s %8s %9s\n",
                "scenario", "roll", "pitch", "yaw", "x", "y", "z", "failed");
  out += line;
  std::snprintf(line, sizeof(line), "%-10s %8s %8s %8s %8s %8s %8s %9s\n", "",
                "[deg]", "[deg]", "[deg]", "[m]", "[m]", "[m]", "");
  out += line;
  for (const auto& s : report.scenarios) {
    if (s.all_failed()) {
      std::snprintf(line, sizeof(line), "%-10s %s\n", s.config.name.c_str(),
                    "all trials failed");
      out += line;
      continue;
    }
    std::snprintf(line, sizeof(line),
                  "%-10s %8.3f %8.3f %8.3f %8.3f %8.3f %8.3f %6d/%-2d\n",
                  s.config.name.c_str(), s.mae.roll_deg, s.mae.pitch_deg,
                  s.mae.yaw_deg, s.mae.x_m, s.mae.y_m, s.mae.z_m, s.failures,
                  static_cast<int>(s.trials.size()));
    out += line;
  }
  return out;
}

std::string format_report_records(const EvalReport& report) {
  std::string out = "scenario,axis,mae\n";
  char line[128];
  for (const auto& s : report.scenarios) {
    const std::pair<const char*, double> cells[6] = {
        {"roll_deg", s.mae.roll_deg}, {"pitch_deg", s.mae.pitch_deg},
        {"yaw_deg", s.mae.yaw_deg},   {"x_m", s.mae.x_m},
        {"y_m", s.mae.y_m},           {"z_m", s.mae.z_m},
    };
    for (const auto& [axis, value] : cells) {
      std::snprintf(line, sizeof(line), "%s,%s,%.17g\n", s.config.name.c_str(),
                    axis, value);
      out += line;
    }
  }
  return out;
}

}  // namespace occalib
