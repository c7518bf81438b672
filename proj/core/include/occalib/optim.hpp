#pragma once

#include <optional>
#include <vector>

#include "occalib/match.hpp"

namespace occalib {

struct CalibParams {
  int n_opt = 10;             // outer re-association iterations
  double d_c_init = 50.0;     // initial cutting distance [px]
  double d_c_decay = 0.5;     // multiplicative per outer iteration
  double d_c_floor = 5.0;     // lower bound [px]
  double huber_delta = 1.0;   // [px]
  int min_pairs = 30;
  int lm_max_iters = 50;
  double lm_lambda_init = 1e-4;
  double step_tol = 1e-8;
  double rel_cost_tol = 1e-6;
  MatchParams match;             // d_c is overridden by the schedule
  bool direction_guided = true;  // occlusion-guided matching toggle
};

enum class CalibStatus : uint8_t { Converged, InsufficientFeatures, Diverged };

const char* calib_status_name(CalibStatus s);

struct IterationRecord {
  int iter = 0;                    // 1-based outer iteration
  double d_c = 0.0;                // cutting distance used for association
  int pairs = 0;                   // matched pair count
  double mean_abs_residual = 0.0;  // mean |f_r| at association time [px]
};

struct CalibrationResult {
  RigidTransform final_transform;
  Twist final_twist;
  std::vector<IterationRecord> trace;
  CalibStatus status = CalibStatus::Converged;
};

/// Signed perpendicular distance n . (p - c) [px].
double point_to_line_residual(const Eigen::Vector2d& p, const CandidateLine& line);

/// Huber cost: r^2 inside |r| <= delta, 2*delta*|r| - delta^2 outside.
double huber_cost(double r, double delta);

/// IRLS weight rho'(r) / (2 r): 1 inside, delta/|r| outside.
double huber_weight(double r, double delta);

/// d(point-to-line residual)/d(twist increment), increment composed on the
/// left of exp_map(xi). Components [0..2] rotation, [3..5] translation.
/// Empty when the point lands behind the camera.
std::optional<Eigen::Matrix<double, 6, 1>> residual_jacobian(
    const Twist& xi, const Eigen::Vector3d& P, const CandidateLine& line,
    const PinholeCamera& cam);

struct LmResult {
  Twist xi;
  CalibStatus status = CalibStatus::Converged;
  double final_cost = 0.0;
  int iterations = 0;
};

/// Levenberg-Marquardt over fixed matches with IRLS Huber weights. Accepted
/// steps never increase the robust cost.
LmResult lm_solve(const std::vector<MatchPair>& matches, const PinholeCamera& cam,
                  const Twist& xi0, const CalibParams& params);

/// Per-frame feature sets; frames share the camera and the extrinsic.
struct FrameFeatures {
  DirectedEdgeSet2D edges2d;
  DirectedEdgeSet3D features3d;
};

/// Association context: each 3D feature set keeps the index of its own frame.
struct MultiFrameContext {
  struct Frame {
    DirectionIndex index;
    DirectedEdgeSet3D features3d;
  };
  std::vector<Frame> frames;
  int skipped_frames = 0;
};

/// Builds per-frame indices; frames with an empty 2D or 3D side are skipped
/// with a warning.
MultiFrameContext accumulate_frames(const std::vector<FrameFeatures>& frames);

/// Algorithm: per outer iteration, associate every frame's 3D features
/// against its own 2D index at the current cutting distance, solve, then
/// shrink d_c towards the floor. The trace records association-time pair
/// counts and mean absolute residuals.
CalibrationResult calibrate_frames(const MultiFrameContext& context,
                                   const PinholeCamera& cam, const Twist& xi0,
                                   const CalibParams& params);

/// Single-frame convenience wrapper.
CalibrationResult calibrate(const DirectedEdgeSet2D& edges2d,
                            const DirectedEdgeSet3D& features3d,
                            const PinholeCamera& cam, const Twist& xi0,
                            const CalibParams& params);

/// Coordinate descent over a 6-D grid of twist-coordinate offsets around xi0,
/// scored by matched-pair count at d_c_init (ties broken by total robust
/// cost). Returns the best grid point as the new initialization.
Twist grid_search_init(const MultiFrameContext& context, const PinholeCamera& cam,
                       const Twist& xi0, double rot_res_deg, double trans_res_m,
                       double rot_span_deg, double trans_span_m,
                       const CalibParams& params);

}  // namespace occalib
