#include <doctest.h>

#include <cmath>

#include "occalib/edge3d.hpp"
#include "occalib/rng.hpp"
#include "oracles.hpp"

using namespace occalib;

namespace {

// A ring scan along +x-ish directions with the given ranges; invalid cells
// are marked by a non-positive range.
OrganizedScan ring_scan(const std::vector<double>& ranges) {
  OrganizedScan scan;
  scan.rings = 1;
  scan.cols = static_cast<int>(ranges.size());
  scan.grid.assign(ranges.size(), {});
  for (int j = 0; j < scan.cols; ++j) {
    if (ranges[j] <= 0.0) continue;
    const double a = deg2rad(0.2 * j);
    LidarReturn& ret = scan.at(0, j);
    ret.range = ranges[j];
    ret.point = ranges[j] * Eigen::Vector3d(std::cos(a), -std::sin(a), 0.0);
    ret.valid = true;
  }
  return scan;
}

OrganizedScan column_scan(const std::vector<double>& ranges) {
  OrganizedScan scan;
  scan.rings = static_cast<int>(ranges.size());
  scan.cols = 1;
  scan.grid.assign(ranges.size(), {});
  for (int i = 0; i < scan.rings; ++i) {
    if (ranges[i] <= 0.0) continue;
    const double e = deg2rad(2.0 - 0.4 * i);
    LidarReturn& ret = scan.at(i, 0);
    ret.range = ranges[i];
    ret.point = ranges[i] * Eigen::Vector3d(std::cos(e), 0.0, std::sin(e));
    ret.valid = true;
  }
  return scan;
}

OrganizedScan points_scan(const std::vector<Eigen::Vector3d>& pts) {
  OrganizedScan scan;
  scan.rings = 1;
  scan.cols = static_cast<int>(pts.size());
  scan.grid.assign(pts.size(), {});
  for (int j = 0; j < scan.cols; ++j) {
    LidarReturn& ret = scan.at(0, j);
    ret.point = pts[j];
    ret.range = pts[j].norm();
    ret.valid = true;
  }
  return scan;
}

}  // namespace

TEST_CASE("ring edge extraction: nearer point, background side") {
  const OrganizedScan scan = ring_scan({5.0, 5.0, 5.0, 10.0, 10.0});

  SUBCASE("default azimuth-to-u mapping") {
    const DirectedEdgeSet3D edges = extract_ring_edges(scan, 0.4, true);
    REQUIRE(edges.of(OcclusionDirection::Right).size() == 1);
    CHECK(edges.of(OcclusionDirection::Right)[0] == scan.at(0, 2).point);
    CHECK(edges.total() == 1);
  }
  SUBCASE("inverted mapping flips L and R") {
    const DirectedEdgeSet3D edges = extract_ring_edges(scan, 0.4, false);
    REQUIRE(edges.of(OcclusionDirection::Left).size() == 1);
    CHECK(edges.of(OcclusionDirection::Left)[0] == scan.at(0, 2).point);
  }
  SUBCASE("descending ranges give the opposite side") {
    const DirectedEdgeSet3D edges =
        extract_ring_edges(ring_scan({10.0, 10.0, 5.0, 5.0}), 0.4, true);
    REQUIRE(edges.of(OcclusionDirection::Left).size() == 1);
  }
}

TEST_CASE("constant ring has no edges") {
  CHECK(extract_ring_edges(ring_scan({7.0, 7.0, 7.0, 7.0}), 0.4).total() == 0);
}

TEST_CASE("invalid cells break ring adjacency") {
  const DirectedEdgeSet3D edges =
      extract_ring_edges(ring_scan({5.0, -1.0, 10.0}), 0.4);
  CHECK(edges.total() == 0);
}

TEST_CASE("column edge extraction: Up when the background is above") {
  const OrganizedScan scan = column_scan({20.0, 20.0, 8.0, 8.0});
  const DirectedEdgeSet3D edges = extract_column_edges(scan, 0.4);
  REQUIRE(edges.of(OcclusionDirection::Up).size() == 1);
  CHECK(edges.of(OcclusionDirection::Up)[0] == scan.at(2, 0).point);
  CHECK(edges.of(OcclusionDirection::Bottom).empty());

  const OrganizedScan inv = column_scan({8.0, 8.0, 20.0, 20.0});
  const DirectedEdgeSet3D edges2 = extract_column_edges(inv, 0.4);
  REQUIRE(edges2.of(OcclusionDirection::Bottom).size() == 1);
  CHECK(edges2.of(OcclusionDirection::Bottom)[0] == inv.at(1, 0).point);
}

TEST_CASE("single-ring scan has no column edges") {
  CHECK(extract_column_edges(ring_scan({5.0, 10.0, 5.0}), 0.4).total() == 0);
}

TEST_CASE("foreground property holds on a simulated frame") {
  const Scene scene = build_scene(standard_scene_spec(17));
  const OrganizedScan scan =
      simulate_lidar(scene, hdl64_model(), standard_lidar_pose(), 2);
  const double thr = 0.4;

  const DirectedEdgeSet3D ring = extract_ring_edges(scan, thr);
  CHECK(ring.total() > 100);
  // Every feature is strictly nearer than its discontinuous neighbor.
  for (int i = 0; i < scan.rings; ++i) {
    for (int j = 0; j + 1 < scan.cols; ++j) {
      const auto& a = scan.at(i, j);
      const auto& b = scan.at(i, j + 1);
      if (!a.valid || !b.valid) continue;
      if (std::abs(a.range - b.range) > thr) {
        CHECK(std::min(a.range, b.range) < std::max(a.range, b.range) - thr);
      }
    }
  }
}

TEST_CASE("RANSAC finds the ground plane among outliers") {
  Rng rng(5);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 800; ++i) {
    pts.emplace_back(rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0), 0.0);
  }
  for (int i = 0; i < 200; ++i) {
    pts.emplace_back(rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0),
                     rng.uniform(0.5, 5.0));
  }
  const auto plane = fit_ground_plane_ransac(points_scan(pts), 0.1, 200, 1);
  REQUIRE(plane.has_value());
  const double angle =
      rad2deg(std::acos(std::clamp(plane->normal.dot(Eigen::Vector3d::UnitZ()),
                                   -1.0, 1.0)));
  CHECK(angle < 0.5);
  CHECK(std::abs(plane->offset) < 0.02);
}

TEST_CASE("RANSAC degenerates to no plane") {
  SUBCASE("collinear points") {
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 50; ++i) {
      pts.emplace_back(static_cast<double>(i), 2.0 * i, -1.0 * i);
    }
    CHECK_FALSE(fit_ground_plane_ransac(points_scan(pts), 0.1, 200, 1).has_value());
  }
  SUBCASE("fewer than three points") {
    std::vector<Eigen::Vector3d> pts = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    CHECK_FALSE(fit_ground_plane_ransac(points_scan(pts), 0.1, 200, 1).has_value());
  }
}

TEST_CASE("RANSAC inliers are exactly the ground returns") {
  // Primitives kept clear of the inlier band around the ground plane.
  SceneSpec spec;
  spec.ground_z = 0.0;
  spec.boxes.push_back({{12.0, 0.0, 2.2}, {0.15, 20.0, 1.9}});  // wall, z >= 0.3
  spec.boxes.push_back({{6.0, -1.5, 0.8}, {0.4, 0.4, 0.5}});    // z >= 0.3
  spec.cylinders.push_back({{5.0, 1.0, 1.2}, 0.1, 1.8});        // z >= 0.3
  const Scene scene = build_scene(spec);
  const OrganizedScan scan =
      simulate_lidar(scene, hdl64_model(), standard_lidar_pose(), 6);

  const double tol = 0.1;
  const auto plane = fit_ground_plane_ransac(scan, tol, 200, 3);
  REQUIRE(plane.has_value());

  const RigidTransform pose = standard_lidar_pose();
  for (const auto& ret : scan.grid) {
    if (!ret.valid) continue;
    const bool inlier = std::abs(plane->signed_distance(ret.point)) <= tol;
    const bool on_ground = std::abs((pose * ret.point).z()) <= 1e-6;
    CHECK(inlier == on_ground);
  }
}

TEST_CASE("remove_near_plane keeps only distant features") {
  PlaneModel ground;  // z = 0
  DirectedEdgeSet3D features;
  features.of(OcclusionDirection::Left).push_back({1.0, 0.0, 0.05});
  features.of(OcclusionDirection::Left).push_back({1.0, 0.0, 1.5});
  const DirectedEdgeSet3D out = remove_near_plane(features, ground, 0.2);
  REQUIRE(out.of(OcclusionDirection::Left).size() == 1);
  CHECK(out.of(OcclusionDirection::Left)[0].z() == 1.5);
}

TEST_CASE("radius outlier filter") {
  SUBCASE("isolated feature is removed, dense pole survives") {
    DirectedEdgeSet3D features;
    for (int i = 0; i < 30; ++i) {
      features.of(OcclusionDirection::Left).push_back({5.0, 0.0, 0.1 * i});
    }
    features.of(OcclusionDirection::Right).push_back({15.0, 0.0, 0.0});
    const DirectedEdgeSet3D out = radius_outlier_filter(features, 0.5, 2);
    CHECK(out.of(OcclusionDirection::Left).size() == 30);
    CHECK(out.of(OcclusionDirection::Right).empty());
  }

  SUBCASE("matches the O(n^2) oracle on 500 random features") {
    Rng rng(77);
    DirectedEdgeSet3D features;
    for (int i = 0; i < 500; ++i) {
      const int d = rng.uniform_int(0, 3);
      features.points[d].push_back(Eigen::Vector3d(
          rng.uniform(0.0, 6.0), rng.uniform(0.0, 6.0), rng.uniform(0.0, 6.0)));
    }
    const DirectedEdgeSet3D fast = radius_outlier_filter(features, 0.5, 2);
    const DirectedEdgeSet3D slow = oracles::brute_radius_filter(features, 0.5, 2);
    for (int d = 0; d < 4; ++d) {
      REQUIRE(fast.points[d].size() == slow.points[d].size());
      for (std::size_t i = 0; i < fast.points[d].size(); ++i) {
        CHECK(fast.points[d][i] == slow.points[d][i]);
      }
    }
  }
}

TEST_CASE("full 3D extraction pipeline") {
  Edge3DParams params;

  SUBCASE("standard scene yields all four directions") {
    const Scene scene = build_scene(standard_scene_spec(1));
    const OrganizedScan scan =
        simulate_lidar(scene, hdl64_model(), standard_lidar_pose(), 1);
    params.ransac_seed = 1;
    const Extraction3D result = extract_3d_features(scan, params);
    REQUIRE(result.ground.has_value());
    for (int d = 0; d < 4; ++d) {
      CHECK(result.features.points[d].size() > 10);
    }
    // Plane removal kept features off the ground.
    for (int d = 0; d < 4; ++d) {
      for (const auto& p : result.features.points[d]) {
        CHECK(std::abs(result.ground->signed_distance(p)) > params.ground_dist);
      }
    }
  }

  SUBCASE("empty scan gives empty sets") {
    OrganizedScan scan;
    scan.rings = 4;
    scan.cols = 8;
    scan.grid.assign(32, {});
    const Extraction3D result = extract_3d_features(scan, params);
    CHECK(result.features.total() == 0);
    CHECK_FALSE(result.ground.has_value());
  }

  SUBCASE("ground-only view is empty after plane removal") {
    SceneSpec spec;
    spec.ground_z = 0.0;
    spec.boxes.push_back({{200.0, 0.0, 1.0}, {0.5, 0.5, 1.0}});  // out of range
    const Scene scene = build_scene(spec);
    const OrganizedScan scan =
        simulate_lidar(scene, hdl64_model(), standard_lidar_pose(), 2);
    params.ransac_seed = 2;
    const Extraction3D result = extract_3d_features(scan, params);
    REQUIRE(result.ground.has_value());
    CHECK(result.features.total() == 0);
  }

  SUBCASE("each stage outputs a subset of its input") {
    const Scene scene = build_scene(standard_scene_spec(9));
    const OrganizedScan scan =
        simulate_lidar(scene, hdl64_model(), standard_lidar_pose(), 9);
    DirectedEdgeSet3D ring = extract_ring_edges(scan, params.occ_threshold);
    const DirectedEdgeSet3D col = extract_column_edges(scan, params.occ_threshold);
    for (int d = 0; d < 4; ++d) {
      ring.points[d].insert(ring.points[d].end(), col.points[d].begin(),
                            col.points[d].end());
    }
    const auto plane =
        fit_ground_plane_ransac(scan, params.ransac_tol, params.ransac_iters, 9);
    REQUIRE(plane.has_value());
    const DirectedEdgeSet3D off_plane =
        remove_near_plane(ring, *plane, params.ground_dist);
    const DirectedEdgeSet3D filtered = radius_outlier_filter(
        off_plane, params.filter_radius, params.min_neighbors);
    for (int d = 0; d < 4; ++d) {
      CHECK(off_plane.points[d].size() <= ring.points[d].size());
      CHECK(filtered.points[d].size() <= off_plane.points[d].size());
    }
  }
}
