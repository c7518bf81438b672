#pragma once

#include <cstdint>
#include <optional>

#include "occalib/match.hpp"
#include "occalib/scene.hpp"

namespace occalib {

struct Edge3DParams {
  double occ_threshold = 0.40;  // range-gap threshold [m]
  double ground_dist = 0.2;     // near-plane removal distance [m]
  double filter_radius = 0.5;   // radius outlier filter [m]
  int min_neighbors = 2;
  double ransac_tol = 0.1;      // plane inlier tolerance [m]
  int ransac_iters = 200;
  uint64_t ransac_seed = 0;
  // Rig mapping: true when increasing azimuth index maps to increasing image
  // u. The presets here satisfy this (clockwise azimuth, forward camera).
  bool azimuth_increases_u = true;
};

/// Horizontal edges (Left/Right) from azimuth-adjacent pairs on each ring.
/// The nearer point of a pair with range gap > occ_threshold is emitted, the
/// direction naming the background side. Invalid cells break adjacency.
DirectedEdgeSet3D extract_ring_edges(const OrganizedScan& scan,
                                     double occ_threshold,
                                     bool azimuth_increases_u = true);

/// Vertical edges (Up/Bottom) from ring-adjacent pairs at fixed azimuth.
/// Ring 0 is the highest elevation, so a background at smaller ring index is
/// Up.
DirectedEdgeSet3D extract_column_edges(const OrganizedScan& scan,
                                       double occ_threshold);

/// Best-of-iters 3-point RANSAC plane, least-squares refined over inliers and
/// oriented with normal.z >= 0. Empty when fewer than 3 valid points, no
/// non-degenerate sample was drawn, or the best inlier fraction is below 0.1.
std::optional<PlaneModel> fit_ground_plane_ransac(const OrganizedScan& scan,
                                                  double inlier_tol, int iters,
                                                  uint64_t seed);

/// Drops features with |signed plane distance| <= dist.
DirectedEdgeSet3D remove_near_plane(const DirectedEdgeSet3D& features,
                                    const PlaneModel& plane, double dist);

/// Keeps features with at least min_neighbors other feature entries (any
/// direction, duplicates included) within radius.
DirectedEdgeSet3D radius_outlier_filter(const DirectedEdgeSet3D& features,
                                        double radius, int min_neighbors);

struct Extraction3D {
  DirectedEdgeSet3D features;
  std::optional<PlaneModel> ground;  // empty => plane removal was skipped
};

/// Ring + column extraction, ground-plane removal, radius filter, in that
/// order. A missing ground plane downgrades to a warning (removal skipped).
Extraction3D extract_3d_features(const OrganizedScan& scan,
                                 const Edge3DParams& params);

}  // namespace occalib
