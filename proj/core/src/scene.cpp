#include "occalib/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "occalib/rng.hpp"

namespace occalib {

namespace {

constexpr double kRayEps = 1e-9;

std::optional<double> ray_plane(const PlaneModel& plane,
                                const Eigen::Vector3d& o,
                                const Eigen::Vector3d& d) {
  const double denom = plane.normal.dot(d);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double t = (plane.offset - plane.normal.dot(o)) / denom;
  if (t <= kRayEps) return std::nullopt;
  return t;
}

std::optional<double> ray_box(const Box& box, const Eigen::Vector3d& o,
                              const Eigen::Vector3d& d) {
  double t0 = kRayEps;
  double t1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double lo = box.center[i] - box.half_extents[i];
    const double hi = box.center[i] + box.half_extents[i];
    if (std::abs(d[i]) < 1e-15) {
      if (o[i] < lo || o[i] > hi) return std::nullopt;
      continue;
    }
    double ta = (lo - o[i]) / d[i];
    double tb = (hi - o[i]) / d[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return t0 > kRayEps ? std::optional<double>(t0)
                      : (t1 > kRayEps ? std::optional<double>(t1) : std::nullopt);
}

std::optional<double> ray_cylinder(const Cylinder& cyl, const Eigen::Vector3d& o,
                                   const Eigen::Vector3d& d) {
  const double zlo = cyl.center.z() - 0.5 * cyl.height;
  const double zhi = cyl.center.z() + 0.5 * cyl.height;
  double best = std::numeric_limits<double>::infinity();

  // Lateral surface.
  const double ox = o.x() - cyl.center.x();
  const double oy = o.y() - cyl.center.y();
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 1e-15) {
    const double b = 2.0 * (ox * d.x() + oy * d.y());
    const double c = ox * ox + oy * oy - cyl.radius * cyl.radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (const double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
        if (t > kRayEps && t < best) {
          const double z = o.z() + t * d.z();
          if (z >= zlo && z <= zhi) best = t;
        }
      }
    }
  }

  // End caps.
  if (std::abs(d.z()) > 1e-15) {
    for (const double zcap : {zlo, zhi}) {
      const double t = (zcap - o.z()) / d.z();
      if (t > kRayEps && t < best) {
        const double px = o.x() + t * d.x() - cyl.center.x();
        const double py = o.y() + t * d.y() - cyl.center.y();
        if (px * px + py * py <= cyl.radius * cyl.radius) best = t;
      }
    }
  }

  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

double box_surface_distance(const Box& box, const Eigen::Vector3d& p) {
  const Eigen::Vector3d q =
      (p - box.center).cwiseAbs() - box.half_extents;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return std::abs(outside + inside);
}

double cylinder_surface_distance(const Cylinder& cyl, const Eigen::Vector3d& p) {
  const double dr = std::hypot(p.x() - cyl.center.x(), p.y() - cyl.center.y()) -
                    cyl.radius;
  const double dz = std::abs(p.z() - cyl.center.z()) - 0.5 * cyl.height;
  const double outside =
      std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
  const double inside = std::min(std::max(dr, dz), 0.0);
  return std::abs(outside + inside);
}

}  // namespace

std::size_t OrganizedScan::valid_count() const {
  std::size_t n = 0;
  for (const auto& r : grid) n += r.valid ? 1 : 0;
  return n;
}

Scene build_scene(const SceneSpec& spec) {
  if (spec.boxes.empty() && spec.cylinders.empty()) {
    throw std::invalid_argument("scene spec has zero primitives");
  }
  for (const auto& b : spec.boxes) {
    if (b.center.z() - b.half_extents.z() < spec.ground_z - 1e-9) {
      throw std::invalid_argument("box extends below the ground plane");
    }
    if ((b.half_extents.array() <= 0.0).any()) {
      throw std::invalid_argument("box half extents must be positive");
    }
  }
  for (const auto& c : spec.cylinders) {
    if (c.center.z() - 0.5 * c.height < spec.ground_z - 1e-9) {
      throw std::invalid_argument("cylinder extends below the ground plane");
    }
    if (c.radius <= 0.0 || c.height <= 0.0) {
      throw std::invalid_argument("cylinder radius/height must be positive");
    }
  }

  Scene scene;
  scene.ground.normal = Eigen::Vector3d::UnitZ();
  scene.ground.offset = spec.ground_z;
  scene.boxes = spec.boxes;
  scene.cylinders = spec.cylinders;
  return scene;
}

std::optional<double> ray_scene_distance(const Scene& scene,
                                         const Eigen::Vector3d& origin,
                                         const Eigen::Vector3d& dir) {
  double best = std::numeric_limits<double>::infinity();
  if (const auto t = ray_plane(scene.ground, origin, dir)) best = std::min(best, *t);
  for (const auto& b : scene.boxes) {
    if (const auto t = ray_box(b, origin, dir)) best = std::min(best, *t);
  }
  for (const auto& c : scene.cylinders) {
    if (const auto t = ray_cylinder(c, origin, dir)) best = std::min(best, *t);
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

double surface_distance(const Scene& scene, const Eigen::Vector3d& p) {
  double best = std::abs(scene.ground.signed_distance(p));
  for (const auto& b : scene.boxes) {
    best = std::min(best, box_surface_distance(b, p));
  }
  for (const auto& c : scene.cylinders) {
    best = std::min(best, cylinder_surface_distance(c, p));
  }
  return best;
}

DepthImage render_depth(const Scene& scene, const PinholeCamera& cam,
                        const RigidTransform& cam_pose) {
  DepthImage img;
  img.width = cam.width;
  img.height = cam.height;
  img.depth.assign(static_cast<std::size_t>(cam.width) * cam.height,
                   kInvalidDepth);

  const Eigen::Vector3d origin = cam_pose.translation;
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      Eigen::Vector3d dir_cam((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0);
      const double inv_norm = 1.0 / dir_cam.norm();
      dir_cam *= inv_norm;
      const Eigen::Vector3d dir_world = cam_pose.rotation * dir_cam;
      if (const auto t = ray_scene_distance(scene, origin, dir_world)) {
        img.at(u, v) = *t * dir_cam.z();  // camera-frame Z of the hit
      }
    }
  }
  return img;
}

OrganizedScan simulate_lidar(const Scene& scene, const LidarModel& model,
                             const RigidTransform& lidar_pose, uint64_t seed) {
  OrganizedScan scan;
  scan.rings = model.rings();
  scan.cols = model.cols();
  scan.grid.assign(static_cast<std::size_t>(scan.rings) * scan.cols, {});

  const double sigma_alpha = model.sigma_alpha_deg;
  const Eigen::Vector3d origin = lidar_pose.translation;

  for (int i = 0; i < scan.rings; ++i) {
    // Sequential laser firing staggers each ring's azimuth lattice, as on
    // the real spinning units; quasi-uniform offsets over the step.
    const double ring_offset_deg =
        std::fmod(i * 0.6180339887498949, 1.0) * model.azimuth_step_deg;
    for (int j = 0; j < scan.cols; ++j) {
      const uint64_t beam_index =
          static_cast<uint64_t>(i) * static_cast<uint64_t>(scan.cols) + j;
      Rng rng = Rng::substream(seed, beam_index);

      const double elev_deg =
          model.ring_elevations_deg[i] + rng.normal() * sigma_alpha;
      const double azim_deg =
          j * model.azimuth_step_deg + ring_offset_deg + rng.normal() * sigma_alpha;
      const double e = deg2rad(elev_deg);
      const double a = deg2rad(azim_deg);
      // Clockwise azimuth from +x seen from above.
      const Eigen::Vector3d dir_lidar(std::cos(e) * std::cos(a),
                                      -std::cos(e) * std::sin(a), std::sin(e));
      const Eigen::Vector3d dir_world = lidar_pose.rotation * dir_lidar;

      const auto t = ray_scene_distance(scene, origin, dir_world);
      if (!t) continue;
      const double range = *t + rng.normal() * model.sigma_r;
      if (range <= kMinDepth || range > model.max_range) continue;

      LidarReturn& ret = scan.at(i, j);
      ret.range = range;
      ret.point = range * dir_lidar;
      ret.valid = true;
    }
  }
  return scan;
}

RigidTransform sample_perturbation(double rot_mag_deg, double trans_mag_m,
                                   uint64_t seed) {
  Rng rng = Rng::substream(seed, "perturbation");
  const Eigen::Vector3d rot_axis = rng.unit_vector();
  const Eigen::Vector3d trans_dir = rng.unit_vector();

  RigidTransform T;
  Twist rot_only;
  rot_only.rot_vec = rot_axis * deg2rad(rot_mag_deg);
  T.rotation = exp_map(rot_only).rotation;
  T.translation = trans_dir * trans_mag_m;
  return T;
}

LidarModel hdl64_model() {
  LidarModel m;
  const int rings = 64;
  const double top = 2.0;
  const double bottom = -24.9;
  m.ring_elevations_deg.resize(rings);
  for (int i = 0; i < rings; ++i) {
    m.ring_elevations_deg[i] = top + (bottom - top) * i / (rings - 1);
  }
  m.azimuth_step_deg = 0.2;
  return m;
}

LidarModel hdl32_model() {
  LidarModel m;
  const int rings = 32;
  const double top = 10.67;
  const double bottom = -30.67;
  m.ring_elevations_deg.resize(rings);
  for (int i = 0; i < rings; ++i) {
    m.ring_elevations_deg[i] = top + (bottom - top) * i / (rings - 1);
  }
  m.azimuth_step_deg = 0.2;
  return m;
}

PinholeCamera standard_camera() {
  // fy is matched to the HDL-64 ring pitch (one ring step spans just over a
  // pixel) so the half-step inward bias of 3D edge features agrees with the
  // half-pixel inward bias of 2D edge pixels; fx likewise sits close to the
  // azimuth pitch. Mismatched grids leave a systematic scale offset that the
  // solver absorbs as forward-translation error.
  PinholeCamera cam;
  cam.fx = 250.0;
  cam.fy = 150.0;
  cam.cx = 320.0;
  cam.cy = 240.0;
  cam.width = 640;
  cam.height = 480;
  return cam;
}

RigidTransform standard_extrinsic() {
  // LiDAR (x fwd, y left, z up) to camera (x right, y down, z fwd). The
  // LiDAR rides a mast roughly 0.9 m above the camera; the depression angle
  // towards the scene makes beam-ring phases sweep along peripheral edges.
  // A small off-nominal mounting rotation is included.
  Eigen::Matrix3d base;
  // clang-format off
  base << 0.0, -1.0,  0.0,
          0.0,  0.0, -1.0,
          1.0,  0.0,  0.0;
  // clang-format on
  Twist tweak;
  tweak.rot_vec = Eigen::Vector3d(0.009, -0.006, 0.052);
  RigidTransform T;
  T.rotation = exp_map(tweak).rotation * base;
  T.translation = Eigen::Vector3d(0.03, -0.9, -0.12);
  return T;
}

RigidTransform standard_lidar_pose() {
  RigidTransform T;
  T.translation = Eigen::Vector3d(0.0, 0.0, 2.5);
  return T;
}

SceneSpec standard_scene_spec(uint64_t seed) {
  Rng rng = Rng::substream(seed, "scene");
  auto jit = [&rng](double m) { return rng.uniform(-m, m); };

  // The layout keeps object silhouettes disjoint in the image (occlusion
  // slivers between foreground objects would be exposed to one sensor but
  // not the other by the mounting parallax) and keeps same-direction edges
  // well separated. Pillar and pole tops rise above the beam fan, so all
  // horizontal edges come from the sign-board stacks. Many boards at three
  // height levels and varied depths are used on purpose: every horizontal
  // edge samples the beam-ring grid at one fixed phase, and pitch accuracy
  // comes from averaging across many independently phased edges; Up and
  // Bottom edge counts stay balanced by construction.
  SceneSpec spec;
  spec.ground_z = 0.0;

  // Back wall: closes the view so silhouettes land on a valid surface.
  spec.boxes.push_back({{12.0 + jit(0.2), jit(0.5), 2.0}, {0.15, 20.0, 2.0}});

  // y placing an object's silhouette center at image column u.
  const PinholeCamera cam = standard_camera();
  const auto y_at = [&](double x, double u) { return (cam.cx - u) * x / cam.fx; };

  // Sign-board stacks, thin along the view axis. Two families:
  //  - close low boards at wide azimuth: the LiDAR's depression angle sweeps
  //    across each edge, so the ring phase varies along it (the per-column
  //    samples decorrelate);
  //  - far mid-height stacks: flat-phased but providing the depth lever that
  //    separates pitch from the vertical translation components.
  const auto stack = [&](double x, double u_center, double hy,
                         std::initializer_list<std::pair<double, double>> bands) {
    const double jx = jit(0.08);
    const double jy = jit(0.05);
    const double jhy = jit(0.015);
    for (const auto& [z_lo, z_hi] : bands) {
      const double jz = jit(0.05);
      spec.boxes.push_back({{x + jx, y_at(x, u_center) + jy, 0.5 * (z_lo + z_hi) + jz},
                            {0.05, hy + jhy, 0.5 * (z_hi - z_lo)}});
    }
  };

  // Counter units: a floating shelf board closed by a tall back panel and a
  // front apron. Their side-top and side-bottom edges vary in depth along
  // the edge, so both the image-pixel row and the beam-ring phase sweep
  // along them; these are the only accurate sources of horizontal edges at
  // this quantization, since a constant-depth edge samples both grids at a
  // single frozen phase. The panel and apron close the rear/front gaps so no
  // constant-depth horizontal edge is emitted.
  const auto counter = [&](double x_lo, double x_hi, double y_near, double y_far,
                           double z_lo, double z_hi) {
    const double jx = jit(0.06);
    const double jy = jit(0.04);
    const double jz = jit(0.04);
    const double y_c = 0.5 * (y_near + y_far) + jy;
    const double hy = 0.5 * std::abs(y_far - y_near);
    const double x_c = 0.5 * (x_lo + x_hi) + jx;
    const double hx = 0.5 * (x_hi - x_lo);
    // shelf board
    spec.boxes.push_back(
        {{x_c, y_c, 0.5 * (z_lo + z_hi) + jz}, {hx, hy, 0.5 * (z_hi - z_lo)}});
    // back panel, top above the beam fan
    spec.boxes.push_back(
        {{x_c + hx + 0.045, y_c, 1.48}, {0.045, hy, 1.48}});
    // front apron down to the ground
    spec.boxes.push_back({{x_c - hx - 0.025, y_c, 0.5 * (z_lo + jz + 0.02)},
                          {0.035, hy, 0.5 * (z_lo + jz + 0.02)}});
  };
  counter(3.4, 5.4, 1.30, 2.55, 1.16, 1.30);   // left of center
  counter(3.6, 5.6, -1.21, -2.10, 1.06, 1.20);  // right of center
  counter(2.9, 4.1, -3.38, -3.93, 1.10, 1.24);  // far right, wide azimuth

  // Corner stacks: thin boards at wide azimuth and larger depth. The strong
  // slant-range gradient at the image corners sweeps the ring phase across
  // even these fronto-parallel edges, and they anchor the far end of the
  // depth range for the vertical family.
  const std::initializer_list<std::pair<double, double>> far_bands = {
      {0.85, 1.15}, {1.45, 1.75}};
  stack(8.3, 102.0, 18.0 * 8.3 / cam.fx, far_bands);
  stack(8.0, 496.0, 18.0 * 8.0 / cam.fx, far_bands);


  // A pillar and poles for the horizontal family; tops above the beam fan.
  // Close poles near the image center keep image position and inverse depth
  // decorrelated across vertical edges (a yaw/translation degeneracy
  // otherwise amplifies the edge quantization phases). Spacings between
  // vertical structures are deliberately uneven: evenly spaced verticals
  // form a ladder with a strong aliased optimum one rung over.
  // Tiered: the upper sections are narrower, so each structure contributes
  // four independently phased vertical edges instead of two.
  {
    const double px = 5.4 + jit(0.08);
    const double py = y_at(5.4, 320.0) + jit(0.05);
    const double hy = 14.0 * 5.4 / cam.fx + jit(0.02);
    spec.boxes.push_back({{px, py, 0.75}, {0.28, hy, 0.75}});
    spec.boxes.push_back({{px, py, 2.25}, {0.28, 0.75 * hy, 0.75}});
  }
  {
    const double px = 2.6 + jit(0.06);
    const double py = y_at(2.6, 268.0) + jit(0.04);
    spec.cylinders.push_back({{px, py, 0.775}, 0.050, 1.55});
    spec.cylinders.push_back({{px, py, 2.275}, 0.034, 1.45});
  }
  return spec;
}

SceneSpec sparse_scene_spec(uint64_t seed) {
  Rng rng = Rng::substream(seed, "scene");
  SceneSpec spec;
  spec.ground_z = 0.0;
  spec.boxes.push_back({{12.0, 0.0, 2.0}, {0.15, 20.0, 2.0}});
  spec.boxes.push_back(
      {{10.5 + rng.uniform(-0.2, 0.2), 0.5 + rng.uniform(-0.2, 0.2), 0.15},
       {0.15, 0.15, 0.15}});
  return spec;
}

}  // namespace occalib
