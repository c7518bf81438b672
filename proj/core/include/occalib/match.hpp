#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "occalib/edge2d.hpp"
#include "occalib/geom.hpp"
#include "occalib/kdtree.hpp"

namespace occalib {

/// 3D occlusion-edge feature points (LiDAR frame) partitioned by direction.
struct DirectedEdgeSet3D {
  std::array<std::vector<Eigen::Vector3d>, 4> points;

  std::vector<Eigen::Vector3d>& of(OcclusionDirection d) {
    return points[direction_index(d)];
  }
  const std::vector<Eigen::Vector3d>& of(OcclusionDirection d) const {
    return points[direction_index(d)];
  }
  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& v : points) n += v.size();
    return n;
  }
};

/// Local 2D line model {center, unit normal} fit to neighbor pixels, with the
/// covariance eigenvalues kept for the curvature test. The normal is the
/// smallest-eigenvalue eigenvector, sign fixed so n.y >= 0 (n.x >= 0 when
/// n.y == 0).
struct CandidateLine {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  Eigen::Vector2d normal = Eigen::Vector2d::UnitY();
  double eig_major = 0.0;
  double eig_minor = 0.0;
};

struct MatchParams {
  double d_c = 50.0;         // cutting distance [px]
  double lambda_a_deg = 50.0;  // angle threshold [deg]
  double lambda_c = 3.0;       // eigenvalue ratio
  int k = 8;                   // neighbor count
  int min_line_neighbors = 4;  // fewer same-direction neighbors -> reject
};

/// Floor of the angle-gate vacuity radius. The effective radius is the
/// neighbor support (max distance from the line center to a neighbor), never
/// less than this; below it the direction of c->p is quantization noise.
inline constexpr double kAngleVacuityRadiusPx = 1.0;

struct MatchPair {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();  // LiDAR frame
  CandidateLine line;
  OcclusionDirection direction = OcclusionDirection::Left;
};

enum class RejectReason : uint8_t {
  None = 0,
  BehindCamera,
  OutOfImage,
  Insufficient,
  Degenerate,
  Distance,
  Angle,
  Curvature,
};

const char* reject_reason_name(RejectReason r);

struct FilterDecision {
  bool accepted = false;
  RejectReason reason = RejectReason::None;
};

/// Per-direction nearest-neighbor indices over the image features, plus a
/// pooled index over all directions for the non-guided ablation path.
class DirectionIndex {
 public:
  explicit DirectionIndex(const DirectedEdgeSet2D& edges);

  std::vector<int> knn(OcclusionDirection d, const Eigen::Vector2d& q, int k) const {
    return trees_[direction_index(d)].knn(q, k);
  }
  const Eigen::Vector2d& point(OcclusionDirection d, int i) const {
    return trees_[direction_index(d)].point(i);
  }
  int size(OcclusionDirection d) const { return trees_[direction_index(d)].size(); }

  /// Pooled across directions (L, R, U, B concatenated in insertion order).
  std::vector<int> knn_pooled(const Eigen::Vector2d& q, int k) const {
    return pooled_.knn(q, k);
  }
  const Eigen::Vector2d& pooled_point(int i) const { return pooled_.point(i); }
  int pooled_size() const { return pooled_.size(); }

 private:
  std::array<KdTree2d, 4> trees_;
  KdTree2d pooled_;
};

/// Mean + smallest-eigenvalue eigenvector of the neighbor covariance.
/// Empty when fewer than 2 distinct points are given (degenerate).
std::optional<CandidateLine> candidate_line(
    std::span<const Eigen::Vector2d> neighbors);

/// The three geometric gates, applied in order: (a) every neighbor within
/// d_c of p, (b) angle between the line normal and c->p folded into
/// [0, 90] deg below lambda_a (vacuous when p is at c), (c) eigenvalue ratio
/// at least lambda_c.
FilterDecision filter_match(const Eigen::Vector2d& p, const CandidateLine& line,
                            std::span<const Eigen::Vector2d> neighbors,
                            const MatchParams& params);

/// Debug record for the match dump, one per 3D feature considered.
struct AssociationRecord {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  OcclusionDirection direction = OcclusionDirection::Left;
  std::optional<Eigen::Vector2d> projected;
  std::optional<CandidateLine> line;
  double residual_px = 0.0;
  bool accepted = false;
  RejectReason reason = RejectReason::None;
};

/// Projects each 3D feature through exp_map(xi), queries the same-direction
/// index (or the pooled one when direction_guided is false) and keeps the
/// pairs that pass filter_match. Output order follows the 3D feature order
/// (directions L, R, U, B, insertion order within each).
std::vector<MatchPair> associate(const DirectedEdgeSet3D& features3d,
                                 const DirectionIndex& index, const Twist& xi,
                                 const PinholeCamera& cam,
                                 const MatchParams& params,
                                 bool direction_guided = true,
                                 std::vector<AssociationRecord>* debug = nullptr);

}  // namespace occalib
