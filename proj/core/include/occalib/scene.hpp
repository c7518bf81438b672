#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "occalib/geom.hpp"

namespace occalib {

/// Axis-aligned box, half_extents per axis.
struct Box {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();
};

/// Vertical capped cylinder; center is the axis midpoint, height the full
/// extent along +z.
struct Cylinder {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.1;
  double height = 1.0;
};

/// Scene description record: everything build_scene needs.
struct SceneSpec {
  double ground_z = 0.0;
  std::vector<Box> boxes;
  std::vector<Cylinder> cylinders;
};

struct Scene {
  PlaneModel ground;
  std::vector<Box> boxes;
  std::vector<Cylinder> cylinders;

  std::size_t primitive_count() const { return boxes.size() + cylinders.size(); }
};

/// Validates the spec (at least one primitive, nothing below ground) and
/// materializes the Scene. Throws std::invalid_argument on violations.
Scene build_scene(const SceneSpec& spec);

/// Velodyne-style spinning LiDAR. Azimuth is measured clockwise from +x when
/// seen from above (so increasing column index maps to increasing image u for
/// a forward-looking camera). Ring elevations are strictly decreasing.
struct LidarModel {
  std::vector<double> ring_elevations_deg;
  double azimuth_step_deg = 0.2;
  double max_range = 80.0;
  double sigma_r = 0.0;          // range noise std [m]
  double sigma_alpha_deg = 0.0;  // angular noise std on elevation and azimuth [deg]

  int rings() const { return static_cast<int>(ring_elevations_deg.size()); }
  int cols() const { return static_cast<int>(std::lround(360.0 / azimuth_step_deg)); }
};

/// Nominal 64-ring preset, elevations evenly spaced +2.0 deg to -24.9 deg.
LidarModel hdl64_model();
/// Nominal 32-ring preset, +10.67 deg to -30.67 deg.
LidarModel hdl32_model();

struct LidarReturn {
  double range = 0.0;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();  // LiDAR frame
  bool valid = false;
};

/// Ring x azimuth grid of returns, ring-major storage.
struct OrganizedScan {
  int rings = 0;
  int cols = 0;
  std::vector<LidarReturn> grid;

  LidarReturn& at(int ring, int col) { return grid[ring * cols + col]; }
  const LidarReturn& at(int ring, int col) const { return grid[ring * cols + col]; }
  std::size_t valid_count() const;
};

inline constexpr double kInvalidDepth = -1.0;

struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depth;  // row-major camera-frame Z, kInvalidDepth on miss

  double at(int u, int v) const { return depth[v * width + u]; }
  double& at(int u, int v) { return depth[v * width + u]; }
  bool valid_at(int u, int v) const { return at(u, v) > 0.0; }
};

/// Nearest-hit distance along the ray (unit dir) or empty on miss.
std::optional<double> ray_scene_distance(const Scene& scene,
                                         const Eigen::Vector3d& origin,
                                         const Eigen::Vector3d& dir);

/// Absolute distance from p to the nearest scene surface (analytic SDF).
double surface_distance(const Scene& scene, const Eigen::Vector3d& p);

/// Per-pixel ray casting; each pixel holds the camera-frame Z of the nearest
/// hit. cam_pose maps camera frame to world.
DepthImage render_depth(const Scene& scene, const PinholeCamera& cam,
                        const RigidTransform& cam_pose);

/// One return per (ring, azimuth) cell. The beam is cast along the
/// noise-perturbed direction, the measured range carries additive range noise
/// and the point is recomputed from the noisy direction and range, so
/// ||point|| == range holds exactly. Seed consumption is per-beam indexed.
OrganizedScan simulate_lidar(const Scene& scene, const LidarModel& model,
                             const RigidTransform& lidar_pose, uint64_t seed);

/// Rotation of angle exactly rot_mag_deg about a uniform random axis plus a
/// translation of norm exactly trans_mag_m in a uniform random direction.
RigidTransform sample_perturbation(double rot_mag_deg, double trans_mag_m,
                                   uint64_t seed);

/// Desk-scale preset used by the synthetic evaluation protocol: ground, back
/// wall, crates, floating sign boards and poles, with seeded placement jitter.
SceneSpec standard_scene_spec(uint64_t seed);

/// Degenerate preset (wall plus one small distant box): too few occlusion
/// edges to calibrate, used to exercise the insufficient-features path.
SceneSpec sparse_scene_spec(uint64_t seed);

/// The rig every preset scenario shares.
PinholeCamera standard_camera();
RigidTransform standard_extrinsic();   // ground-truth T_L^C
RigidTransform standard_lidar_pose();  // LiDAR frame -> world

}  // namespace occalib
