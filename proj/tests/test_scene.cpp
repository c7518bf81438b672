#include <doctest.h>

#include <cmath>
#include <set>

#include "occalib/edge2d.hpp"
#include "occalib/rng.hpp"
#include "occalib/scene.hpp"

using namespace occalib;

namespace {

// Camera looking along world +x with y left, z up behind it (the standard
// rig base without the mounting tweak).
RigidTransform forward_camera_pose(const Eigen::Vector3d& position) {
  RigidTransform pose;
  Eigen::Matrix3d R_cw;  // camera axes expressed in world
  // cam x (right) -> world -y, cam y (down) -> world -z, cam z (fwd) -> world +x
  R_cw.col(0) = Eigen::Vector3d(0.0, -1.0, 0.0);
  R_cw.col(1) = Eigen::Vector3d(0.0, 0.0, -1.0);
  R_cw.col(2) = Eigen::Vector3d(1.0, 0.0, 0.0);
  pose.rotation = R_cw;
  pose.translation = position;
  return pose;
}

PinholeCamera small_camera() {
  PinholeCamera cam;
  cam.fx = 250.0;
  cam.fy = 250.0;
  cam.cx = 320.0;
  cam.cy = 240.0;
  cam.width = 640;
  cam.height = 480;
  return cam;
}

}  // namespace

TEST_CASE("build_scene echoes a valid spec") {
  SceneSpec spec;
  spec.ground_z = 0.0;
  spec.boxes.push_back({{5.0, 0.0, 0.5}, {0.5, 0.5, 0.5}});
  spec.cylinders.push_back({{8.0, 1.0, 1.0}, 0.1, 2.0});
  const Scene scene = build_scene(spec);
  CHECK(scene.primitive_count() == 2);
  CHECK(scene.ground.normal == Eigen::Vector3d::UnitZ());
}

TEST_CASE("build_scene rejects bad specs") {
  SceneSpec empty;
  CHECK_THROWS_AS(build_scene(empty), std::invalid_argument);

  SceneSpec below;
  below.boxes.push_back({{5.0, 0.0, -1.0}, {0.5, 0.5, 0.5}});
  CHECK_THROWS_AS(build_scene(below), std::invalid_argument);

  SceneSpec sunk_pole;
  sunk_pole.cylinders.push_back({{5.0, 0.0, 0.0}, 0.1, 2.0});
  CHECK_THROWS_AS(build_scene(sunk_pole), std::invalid_argument);
}

TEST_CASE("scene presets are deterministic in the seed") {
  const SceneSpec a = standard_scene_spec(123);
  const SceneSpec b = standard_scene_spec(123);
  const SceneSpec c = standard_scene_spec(124);
  REQUIRE(a.boxes.size() == b.boxes.size());
  for (std::size_t i = 0; i < a.boxes.size(); ++i) {
    CHECK(a.boxes[i].center == b.boxes[i].center);
    CHECK(a.boxes[i].half_extents == b.boxes[i].half_extents);
  }
  CHECK(a.boxes[1].center != c.boxes[1].center);
}

TEST_CASE("render_depth against a fronto-parallel wall") {
  SceneSpec spec;
  spec.boxes.push_back({{0.0, 0.0, 10.5}, {50.0, 50.0, 0.5}});  // face at z=10
  const Scene scene = build_scene(spec);
  const PinholeCamera cam = small_camera();
  RigidTransform pose;  // identity: camera looks along world +z
  pose.translation = Eigen::Vector3d(0.0, 0.0, 1.0);

  const DepthImage img = render_depth(scene, cam, pose);
  CHECK(img.at(320, 240) == doctest::Approx(9.0).epsilon(1e-12));
  int valid = 0;
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      REQUIRE(img.valid_at(u, v));
      CHECK(img.at(u, v) >= 9.0 - 1e-12);
      ++valid;
    }
  }
  CHECK(valid == img.width * img.height);
}

TEST_CASE("render_depth of bare ground leaves the upper half invalid") {
  SceneSpec spec;
  spec.boxes.push_back({{-50.0, 0.0, 0.2}, {0.1, 0.1, 0.2}});  // behind camera
  const Scene scene = build_scene(spec);
  const PinholeCamera cam = small_camera();
  const DepthImage img =
      render_depth(scene, cam, forward_camera_pose({0.0, 0.0, 1.0}));

  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; u += 7) {
      if (v <= cam.cy) {
        CHECK_FALSE(img.valid_at(u, v));
      } else {
        CHECK(img.valid_at(u, v));
      }
    }
  }
}

TEST_CASE("render_depth box in front of wall is bimodal at analytic depths") {
  SceneSpec spec;
  spec.boxes.push_back({{5.0, 0.0, 1.0}, {0.5, 0.8, 0.8}});    // face at x=4.5
  spec.boxes.push_back({{10.0, 0.0, 2.5}, {0.15, 30.0, 2.5}});  // face at x=9.85
  const Scene scene = build_scene(spec);
  const PinholeCamera cam = small_camera();
  const DepthImage img =
      render_depth(scene, cam, forward_camera_pose({0.0, 0.0, 1.0}));

  // Above the horizon only box, wall or sky are visible; fronto-parallel
  // faces give exactly constant depth.
  int near = 0, far = 0;
  for (int v = 0; v < 230; ++v) {
    for (int u = 0; u < img.width; ++u) {
      if (!img.valid_at(u, v)) continue;
      const double d = img.at(u, v);
      if (std::abs(d - 4.5) < 1e-12) {
        ++near;
      } else if (std::abs(d - 9.85) < 1e-12) {
        ++far;
      } else {
        FAIL("unexpected depth value ", d);
      }
    }
  }
  CHECK(near > 1000);
  CHECK(far > 10000);

  // At least one row crosses the box silhouette: a depth discontinuity column.
  bool found_discontinuity = false;
  for (int u = 0; u + 1 < img.width && !found_discontinuity; ++u) {
    if (img.valid_at(u, 200) && img.valid_at(u + 1, 200)) {
      found_discontinuity = std::abs(img.at(u, 200) - img.at(u + 1, 200)) > 1.0;
    }
  }
  CHECK(found_discontinuity);
}

TEST_CASE("simulate_lidar hits a wall at the analytic range") {
  SceneSpec spec;
  spec.boxes.push_back({{10.5, 0.0, 1.0}, {0.5, 50.0, 1.0}});  // face at x=10
  const Scene scene = build_scene(spec);

  LidarModel model;
  model.ring_elevations_deg = {0.0};
  model.azimuth_step_deg = 90.0;
  RigidTransform pose;  // LiDAR at world origin

  const OrganizedScan scan = simulate_lidar(scene, model, pose, 1);
  REQUIRE(scan.rings == 1);
  REQUIRE(scan.cols == 4);
  REQUIRE(scan.at(0, 0).valid);  // azimuth 0 = +x
  CHECK(scan.at(0, 0).range == doctest::Approx(10.0).epsilon(1e-12));
  CHECK((scan.at(0, 0).point - Eigen::Vector3d(10.0, 0.0, 0.0)).norm() < 1e-9);
}

TEST_CASE("range noise statistics match sigma_r") {
  SceneSpec spec;
  spec.boxes.push_back({{10.5, 0.0, 1.0}, {0.5, 50.0, 1.0}});
  const Scene scene = build_scene(spec);

  LidarModel model;
  model.ring_elevations_deg = {0.0};
  model.azimuth_step_deg = 90.0;
  model.sigma_r = 0.02;
  RigidTransform pose;

  double sum = 0.0, sum2 = 0.0;
  const int n = 10000;
  for (int seed = 0; seed < n; ++seed) {
    const OrganizedScan scan = simulate_lidar(scene, model, pose, seed);
    REQUIRE(scan.at(0, 0).valid);
    const double r = scan.at(0, 0).range;
    sum += r;
    sum2 += r * r;
  }
  const double mean = sum / n;
  const double std_dev = std::sqrt(sum2 / n - mean * mean);
  CHECK(mean == doctest::Approx(10.0).epsilon(1e-3));
  CHECK(std_dev >= 0.018);
  CHECK(std_dev <= 0.022);
}

TEST_CASE("same seed gives identical scans") {
  const Scene scene = build_scene(standard_scene_spec(5));
  LidarModel model = hdl64_model();
  model.sigma_r = 0.02;
  model.sigma_alpha_deg = 0.005;

  const OrganizedScan a = simulate_lidar(scene, model, standard_lidar_pose(), 77);
  const OrganizedScan b = simulate_lidar(scene, model, standard_lidar_pose(), 77);
  REQUIRE(a.grid.size() == b.grid.size());
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    CHECK(a.grid[i].valid == b.grid[i].valid);
    CHECK(a.grid[i].range == b.grid[i].range);
    CHECK(a.grid[i].point == b.grid[i].point);
  }
}

TEST_CASE("noise-free scan points lie on scene surfaces") {
  const Scene scene = build_scene(standard_scene_spec(11));
  const LidarModel model = hdl64_model();  // sigma 0
  const RigidTransform pose = standard_lidar_pose();
  const OrganizedScan scan = simulate_lidar(scene, model, pose, 3);

  CHECK(scan.valid_count() > 10000);
  for (const auto& ret : scan.grid) {
    if (!ret.valid) continue;
    CHECK(std::abs(ret.point.norm() - ret.range) <= 1e-6);
    const Eigen::Vector3d world = pose * ret.point;
    CHECK(surface_distance(scene, world) <= 1e-6);
  }
}

TEST_CASE("noisy scan keeps the point/range identity") {
  const Scene scene = build_scene(standard_scene_spec(11));
  LidarModel model = hdl64_model();
  model.sigma_r = 0.04;
  model.sigma_alpha_deg = 0.005;
  const OrganizedScan scan =
      simulate_lidar(scene, model, standard_lidar_pose(), 9);
  for (const auto& ret : scan.grid) {
    if (!ret.valid) continue;
    CHECK(std::abs(ret.point.norm() - ret.range) <= 1e-6);
  }
}

TEST_CASE("sample_perturbation magnitudes are exact") {
  SUBCASE("zero magnitudes give the identity") {
    const RigidTransform T = sample_perturbation(0.0, 0.0, 42);
    CHECK((T.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(T.translation.norm() == 0.0);
  }
  SUBCASE("2 deg / 0.15 m") {
    for (uint64_t seed = 0; seed < 50; ++seed) {
      const RigidTransform T = sample_perturbation(2.0, 0.15, seed);
      const Twist xi = log_map(T);
      CHECK(std::abs(xi.rot_vec.norm() - deg2rad(2.0)) <= 1e-9);
      CHECK(std::abs(T.translation.norm() - 0.15) <= 1e-9);
    }
  }
}

TEST_CASE("perturbation axes are uniform over octants") {
  int counts[8] = {};
  const int n = 1000;
  for (int seed = 0; seed < n; ++seed) {
    const RigidTransform T = sample_perturbation(2.0, 0.15, seed);
    const Eigen::Vector3d axis = log_map(T).rot_vec.normalized();
    const int octant = (axis.x() > 0 ? 1 : 0) | (axis.y() > 0 ? 2 : 0) |
                       (axis.z() > 0 ? 4 : 0);
    ++counts[octant];
  }
  double chi2 = 0.0;
  const double expected = n / 8.0;
  for (const int c : counts) {
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // 7 degrees of freedom, p > 0.01 -> chi2 below 18.475
  CHECK(chi2 < 18.475);
}

TEST_CASE("depth image and scan are cross-consistent through the extrinsic") {
  const Scene scene = build_scene(standard_scene_spec(21));
  const PinholeCamera cam = standard_camera();
  const RigidTransform gt = standard_extrinsic();
  const RigidTransform lidar_pose = standard_lidar_pose();
  const RigidTransform cam_pose = lidar_pose * gt.inverse();

  const DepthImage depth = render_depth(scene, cam, cam_pose);
  const OrganizedScan scan = simulate_lidar(scene, hdl64_model(), lidar_pose, 4);

  int in_image = 0, consistent = 0;
  const double lambda_occ = 0.40;
  for (const auto& ret : scan.grid) {
    if (!ret.valid) continue;
    const Eigen::Vector3d X = gt * ret.point;
    const auto px = project_point(cam, X);
    if (!px || !cam.in_image(*px)) continue;
    ++in_image;
    bool ok = false;
    const int u0 = static_cast<int>(std::floor(px->x()));
    const int v0 = static_cast<int>(std::floor(px->y()));
    for (int dv = -1; dv <= 1 && !ok; ++dv) {
      for (int du = -1; du <= 1 && !ok; ++du) {
        const int u = u0 + du, v = v0 + dv;
        if (u < 0 || u >= depth.width || v < 0 || v >= depth.height) continue;
        ok = depth.valid_at(u, v) && std::abs(depth.at(u, v) - X.z()) <= lambda_occ;
      }
    }
    if (ok) ++consistent;
  }
  REQUIRE(in_image > 5000);
  CHECK(static_cast<double>(consistent) / in_image >= 0.99);
}
