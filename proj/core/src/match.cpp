#include "occalib/match.hpp"

#include <algorithm>
#include <cmath>

namespace occalib {

const char* reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::None: return "none";
    case RejectReason::BehindCamera: return "behind_camera";
    case RejectReason::OutOfImage: return "out_of_image";
    case RejectReason::Insufficient: return "insufficient";
    case RejectReason::Degenerate: return "degenerate";
    case RejectReason::Distance: return "distance";
    case RejectReason::Angle: return "angle";
    case RejectReason::Curvature: return "curvature";
  }
  return "?";
}

namespace {

std::vector<Eigen::Vector2d> to_double(const std::vector<Eigen::Vector2i>& pts) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p.cast<double>());
  return out;
}

}  // namespace

DirectionIndex::DirectionIndex(const DirectedEdgeSet2D& edges) {
  std::vector<Eigen::Vector2d> pooled;
  pooled.reserve(edges.total());
  for (int d = 0; d < 4; ++d) {
    auto pts = to_double(edges.points[d]);
    pooled.insert(pooled.end(), pts.begin(), pts.end());
    trees_[d] = KdTree2d(std::move(pts));
  }
  pooled_ = KdTree2d(std::move(pooled));
}

std::optional<CandidateLine> candidate_line(
    std::span<const Eigen::Vector2d> neighbors) {
  if (neighbors.size() < 2) return std::nullopt;
  bool distinct = false;
  for (std::size_t i = 1; i < neighbors.size() && !distinct; ++i) {
    distinct = neighbors[i] != neighbors[0];
  }
  if (!distinct) return std::nullopt;

  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : neighbors) mean += p;
  mean /= static_cast<double>(neighbors.size());

  double a = 0.0, b = 0.0, c = 0.0;  // covariance [[a, b], [b, c]]
  for (const auto& p : neighbors) {
    const Eigen::Vector2d d = p - mean;
    a += d.x() * d.x();
    b += d.x() * d.y();
    c += d.y() * d.y();
  }
  const double inv_n = 1.0 / static_cast<double>(neighbors.size());
  a *= inv_n;
  b *= inv_n;
  c *= inv_n;

  const double half_tr = 0.5 * (a + c);
  const double disc = std::sqrt(std::max(0.25 * (a - c) * (a - c) + b * b, 0.0));
  const double eig_major = half_tr + disc;
  const double eig_minor = std::max(half_tr - disc, 0.0);

  // Eigenvector of the smaller eigenvalue; pick the better-conditioned row.
  Eigen::Vector2d n(b, eig_minor - a);
  Eigen::Vector2d alt(eig_minor - c, b);
  if (alt.squaredNorm() > n.squaredNorm()) n = alt;
  if (n.squaredNorm() < 1e-24) {
    // Isotropic neighborhood (a == c, b == 0): no preferred direction, fall
    // back to the canonical vertical normal.
    n = Eigen::Vector2d::UnitY();
  }
  n.normalize();
  if (n.y() < 0.0 || (n.y() == 0.0 && n.x() < 0.0)) n = -n;

  CandidateLine line;
  line.center = mean;
  line.normal = n;
  line.eig_major = eig_major;
  line.eig_minor = eig_minor;
  return line;
}

FilterDecision filter_match(const Eigen::Vector2d& p, const CandidateLine& line,
                            std::span<const Eigen::Vector2d> neighbors,
                            const MatchParams& params) {
  for (const auto& q : neighbors) {
    if ((q - p).norm() > params.d_c) return {false, RejectReason::Distance};
  }

  // Within the neighbor support the direction of c->p measures position
  // along the fitted segment, not displacement away from it, so the angle
  // test only fires outside the support radius. Matches displaced along the
  // edge by a missing segment always land far beyond it.
  double support = kAngleVacuityRadiusPx;
  for (const auto& q : neighbors) {
    support = std::max(support, (q - line.center).norm());
  }
  const Eigen::Vector2d v = p - line.center;
  const double vn = v.norm();
  if (vn >= support) {
    // Fold into [0, 90] deg: the normal's sign carries no information.
    const double cos_angle = std::clamp(std::abs(line.normal.dot(v) / vn), 0.0, 1.0);
    const double angle_deg = rad2deg(std::acos(cos_angle));
    if (angle_deg >= params.lambda_a_deg) return {false, RejectReason::Angle};
  }

  if (line.eig_major < params.lambda_c * line.eig_minor) {
    return {false, RejectReason::Curvature};
  }
  return {true, RejectReason::None};
}

std::vector<MatchPair> associate(const DirectedEdgeSet3D& features3d,
                                 const DirectionIndex& index, const Twist& xi,
                                 const PinholeCamera& cam,
                                 const MatchParams& params,
                                 bool direction_guided,
                                 std::vector<AssociationRecord>* debug) {
  const RigidTransform T = exp_map(xi);
  std::vector<MatchPair> matches;
  std::vector<Eigen::Vector2d> neighbor_pts;

  for (const OcclusionDirection dir : kAllDirections) {
    for (const Eigen::Vector3d& P : features3d.of(dir)) {
      AssociationRecord rec;
      rec.point = P;
      rec.direction = dir;

      const auto px = project_point(cam, T * P);
      if (!px) {
        rec.reason = RejectReason::BehindCamera;
        if (debug) debug->push_back(rec);
        continue;
      }
      rec.projected = px;
      if (!cam.in_image(*px)) {
        rec.reason = RejectReason::OutOfImage;
        if (debug) debug->push_back(rec);
        continue;
      }

      const std::vector<int> nn = direction_guided
                                      ? index.knn(dir, *px, params.k)
                                      : index.knn_pooled(*px, params.k);
      if (static_cast<int>(nn.size()) < params.min_line_neighbors) {
        rec.reason = RejectReason::Insufficient;
        if (debug) debug->push_back(rec);
        continue;
      }

      neighbor_pts.clear();
      for (const int i : nn) {
        neighbor_pts.push_back(direction_guided ? index.point(dir, i)
                                                : index.pooled_point(i));
      }
      const auto line = candidate_line(neighbor_pts);
      if (!line) {
        rec.reason = RejectReason::Degenerate;
        if (debug) debug->push_back(rec);
        continue;
      }
      rec.line = line;
      rec.residual_px = line->normal.dot(*px - line->center);

      const FilterDecision decision =
          filter_match(*px, *line, neighbor_pts, params);
      rec.accepted = decision.accepted;
      rec.reason = decision.reason;
      if (debug) debug->push_back(rec);
      if (decision.accepted) {
        matches.push_back({P, *line, dir});
      }
    }
  }
  return matches;
}

}  // namespace occalib
