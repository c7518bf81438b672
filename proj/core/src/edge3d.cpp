#include "occalib/edge3d.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>

#include "occalib/kdtree.hpp"
#include "occalib/rng.hpp"

namespace occalib {

DirectedEdgeSet3D extract_ring_edges(const OrganizedScan& scan,
                                     double occ_threshold,
                                     bool azimuth_increases_u) {
  const OcclusionDirection larger_az =
      azimuth_increases_u ? OcclusionDirection::Right : OcclusionDirection::Left;
  const OcclusionDirection smaller_az =
      azimuth_increases_u ? OcclusionDirection::Left : OcclusionDirection::Right;

  DirectedEdgeSet3D edges;
  for (int i = 0; i < scan.rings; ++i) {
    for (int j = 0; j + 1 < scan.cols; ++j) {
      const LidarReturn& a = scan.at(i, j);
      const LidarReturn& b = scan.at(i, j + 1);
      if (!a.valid || !b.valid) continue;
      if (b.range - a.range > occ_threshold) {
        edges.of(larger_az).push_back(a.point);  // background at larger azimuth
      } else if (a.range - b.range > occ_threshold) {
        edges.of(smaller_az).push_back(b.point);
      }
    }
  }
  return edges;
}

DirectedEdgeSet3D extract_column_edges(const OrganizedScan& scan,
                                       double occ_threshold) {
  DirectedEdgeSet3D edges;
  for (int j = 0; j < scan.cols; ++j) {
    for (int i = 0; i + 1 < scan.rings; ++i) {
      const LidarReturn& upper = scan.at(i, j);
      const LidarReturn& lower = scan.at(i + 1, j);
      if (!upper.valid || !lower.valid) continue;
      if (upper.range - lower.range > occ_threshold) {
        edges.of(OcclusionDirection::Up).push_back(lower.point);
      } else if (lower.range - upper.range > occ_threshold) {
        edges.of(OcclusionDirection::Bottom).push_back(upper.point);
      }
    }
  }
  return edges;
}

std::optional<PlaneModel> fit_ground_plane_ransac(const OrganizedScan& scan,
                                                  double inlier_tol, int iters,
                                                  uint64_t seed) {
  std::vector<const Eigen::Vector3d*> pts;
  pts.reserve(scan.grid.size());
  for (const auto& r : scan.grid) {
    if (r.valid) pts.push_back(&r.point);
  }
  const int n = static_cast<int>(pts.size());
  if (n < 3) return std::nullopt;

  Rng rng = Rng::substream(seed, "ransac");
  Eigen::Vector3d best_normal = Eigen::Vector3d::Zero();
  double best_offset = 0.0;
  int best_count = -1;

  for (int it = 0; it < iters; ++it) {
    const int ia = rng.uniform_int(0, n - 1);
    int ib = rng.uniform_int(0, n - 1);
    int ic = rng.uniform_int(0, n - 1);
    if (ia == ib || ia == ic || ib == ic) continue;
    const Eigen::Vector3d& p0 = *pts[ia];
    Eigen::Vector3d normal = (*pts[ib] - p0).cross(*pts[ic] - p0);
    const double nn = normal.norm();
    if (nn < 1e-12) continue;  // collinear sample
    normal /= nn;
    const double offset = normal.dot(p0);

    int count = 0;
    for (const auto* p : pts) {
      if (std::abs(normal.dot(*p) - offset) <= inlier_tol) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best_normal = normal;
      best_offset = offset;
    }
  }

  if (best_count < 3 || best_count < static_cast<int>(0.1 * n)) {
    return std::nullopt;
  }

  // Least-squares refinement over the inliers of the best hypothesis.
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  std::vector<const Eigen::Vector3d*> inliers;
  inliers.reserve(best_count);
  for (const auto* p : pts) {
    if (std::abs(best_normal.dot(*p) - best_offset) <= inlier_tol) {
      inliers.push_back(p);
      centroid += *p;
    }
  }
  centroid /= static_cast<double>(inliers.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto* p : inliers) {
    const Eigen::Vector3d d = *p - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  Eigen::Vector3d normal = es.eigenvectors().col(0);  // smallest eigenvalue

  if (normal.z() < 0.0 ||
      (normal.z() == 0.0 && (normal.y() < 0.0 ||
                             (normal.y() == 0.0 && normal.x() < 0.0)))) {
    normal = -normal;
  }

  PlaneModel plane;
  plane.normal = normal;
  plane.offset = normal.dot(centroid);
  return plane;
}

DirectedEdgeSet3D remove_near_plane(const DirectedEdgeSet3D& features,
                                    const PlaneModel& plane, double dist) {
  DirectedEdgeSet3D out;
  for (int d = 0; d < 4; ++d) {
    for (const auto& p : features.points[d]) {
      if (std::abs(plane.signed_distance(p)) > dist) {
        out.points[d].push_back(p);
      }
    }
  }
  return out;
}

DirectedEdgeSet3D radius_outlier_filter(const DirectedEdgeSet3D& features,
                                        double radius, int min_neighbors) {
  std::vector<Eigen::Vector3d> pooled;
  pooled.reserve(features.total());
  for (int d = 0; d < 4; ++d) {
    pooled.insert(pooled.end(), features.points[d].begin(),
                  features.points[d].end());
  }
  const KdTree3d tree(pooled);

  DirectedEdgeSet3D out;
  int offset = 0;
  for (int d = 0; d < 4; ++d) {
    for (std::size_t i = 0; i < features.points[d].size(); ++i) {
      const int self = offset + static_cast<int>(i);
      const auto found = tree.radius(pooled[self], radius);
      // self is always among the results at distance zero
      if (static_cast<int>(found.size()) - 1 >= min_neighbors) {
        out.points[d].push_back(features.points[d][i]);
      }
    }
    offset += static_cast<int>(features.points[d].size());
  }
  return out;
}

Extraction3D extract_3d_features(const OrganizedScan& scan,
                                 const Edge3DParams& params) {
  Extraction3D result;

  DirectedEdgeSet3D edges =
      extract_ring_edges(scan, params.occ_threshold, params.azimuth_increases_u);
  DirectedEdgeSet3D vertical = extract_column_edges(scan, params.occ_threshold);
  for (int d = 0; d < 4; ++d) {
    edges.points[d].insert(edges.points[d].end(), vertical.points[d].begin(),
                           vertical.points[d].end());
  }

  result.ground = fit_ground_plane_ransac(scan, params.ransac_tol,
                                          params.ransac_iters, params.ransac_seed);
  if (result.ground) {
    edges = remove_near_plane(edges, *result.ground, params.ground_dist);
  } else {
    std::fprintf(stderr,
                 "warning: ground plane not found, skipping plane removal\n");
  }

  result.features =
      radius_outlier_filter(edges, params.filter_radius, params.min_neighbors);
  return result;
}

}  // namespace occalib
