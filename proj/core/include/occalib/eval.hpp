#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "occalib/edge3d.hpp"
#include "occalib/optim.hpp"
#include "occalib/scene.hpp"

namespace occalib {

/// Per-axis absolute errors of est against gt, from the error transform
/// gt^-1 * est. Roll-pitch-yaw uses the x-y-z fixed-axis convention
/// (R = Rz(yaw) Ry(pitch) Rx(roll)); the total rotation angle is
/// convention-free.
struct AxisErrors {
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  double yaw_deg = 0.0;
  double x_m = 0.0;
  double y_m = 0.0;
  double z_m = 0.0;
  double total_rotation_deg = 0.0;
  double total_translation_m = 0.0;
};

AxisErrors rotation_translation_errors(const RigidTransform& est,
                                       const RigidTransform& gt);

/// One evaluation scenario of the synthetic protocol (a Table-1-style row).
struct Scenario {
  std::string name = "test1";
  std::string lidar = "hdl64";  // "hdl64" | "hdl32"
  double missing_rate = 0.0;
  double sigma_r = 0.02;
  double sigma_alpha_deg = 0.0;
  int trials = 20;
  uint64_t seed = 1;
  double perturb_rot_deg = 2.0;
  double perturb_trans_m = 0.15;
  bool ogm = true;     // occlusion-guided matching
  bool use_ub = true;  // keep Up/Bottom features
};

struct TrialResult {
  AxisErrors errors;
  CalibStatus status = CalibStatus::Converged;
  std::vector<IterationRecord> trace;
};

struct ScenarioReport {
  Scenario config;
  std::vector<TrialResult> trials;
  AxisErrors mae;  // per-axis mean absolute error over all trials
  int failures = 0;

  bool all_failed() const {
    return !trials.empty() && failures == static_cast<int>(trials.size());
  }
};

struct SweepConfig {
  std::vector<Scenario> scenarios;
  CalibParams calib;
  Edge3DParams edge3d;
};

struct EvalReport {
  std::vector<ScenarioReport> scenarios;
};

/// Everything one synthetic trial produces before calibration.
struct TrialData {
  Scene scene;
  PinholeCamera cam;
  RigidTransform gt;          // T_L^C
  RigidTransform perturbation;
  Twist xi0;                  // Log(gt * perturbation)
  DepthImage depth;
  OrganizedScan scan;
  DirectedEdgeSet2D edges2d;  // after dropout
  DirectedEdgeSet3D features3d;
};

/// Builds the standard synthetic frame for (scenario, trial index): scene,
/// depth render, 2D oracle edges + dropout, LiDAR scan, 3D extraction and the
/// perturbed initial guess. All randomness flows from named substreams of the
/// scenario seed and trial index.
TrialData make_trial(const Scenario& scenario, int trial,
                     const Edge3DParams& edge_params);

/// Runs every trial of a scenario and aggregates per-axis MAE over all
/// trials (failed trials contribute the errors of their last estimate and are
/// counted in failures).
ScenarioReport run_scenario(const Scenario& scenario, const CalibParams& calib,
                            const Edge3DParams& edge_params);

EvalReport run_sweep(const SweepConfig& config);

/// Aligned plain-text table of a report (Table-1-style layout).
std::string format_report_table(const EvalReport& report);

/// Machine-readable companion: one `scenario,axis,mae` line per cell.
std::string format_report_records(const EvalReport& report);

}  // namespace occalib
