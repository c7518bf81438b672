#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "occalib/scene.hpp"

namespace occalib {

/// Side on which the background lies relative to the foreground edge point.
/// The same convention is applied to 2D pixels and 3D returns; matching only
/// needs the two to agree.
enum class OcclusionDirection : uint8_t { Left = 0, Right = 1, Up = 2, Bottom = 3 };

inline constexpr std::array<OcclusionDirection, 4> kAllDirections = {
    OcclusionDirection::Left, OcclusionDirection::Right, OcclusionDirection::Up,
    OcclusionDirection::Bottom};

inline constexpr int direction_index(OcclusionDirection d) {
  return static_cast<int>(d);
}

char direction_code(OcclusionDirection d);
std::optional<OcclusionDirection> direction_from_code(char c);

/// Image occlusion-edge feature points partitioned by direction.
struct DirectedEdgeSet2D {
  std::array<std::vector<Eigen::Vector2i>, 4> points;

  std::vector<Eigen::Vector2i>& of(OcclusionDirection d) {
    return points[direction_index(d)];
  }
  const std::vector<Eigen::Vector2i>& of(OcclusionDirection d) const {
    return points[direction_index(d)];
  }
  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& v : points) n += v.size();
    return n;
  }
};

enum class PairOcclusion : uint8_t { None = 0, FirstOccludes = 1, SecondOccludes = 2 };

/// Occlusion labels for horizontally/vertically adjacent pixel pairs.
/// horizontal[(v, u)] covers ((u,v),(u+1,v)); vertical[(v, u)] covers
/// ((u,v),(u,v+1)).
struct PixelPairLabels {
  int width = 0;
  int height = 0;
  std::vector<PairOcclusion> horizontal;  // (width-1) * height
  std::vector<PairOcclusion> vertical;    // width * (height-1)

  PairOcclusion h_at(int u, int v) const { return horizontal[v * (width - 1) + u]; }
  PairOcclusion v_at(int u, int v) const { return vertical[v * width + u]; }
};

/// Depth-oracle labeling of adjacent pixel pairs: the nearer pixel occludes
/// when the depth gap exceeds occ_threshold; a valid pixel always occludes an
/// invalid neighbor (foreground against empty background).
PixelPairLabels label_pixel_pairs(const DepthImage& depth, double occ_threshold);

/// Foreground pixels of occluding pairs, tagged with the side of their
/// background neighbor. Row-major scan order, no duplicate (pixel, direction).
DirectedEdgeSet2D extract_edge_points_2d(const PixelPairLabels& labels);

/// Removes edge points under random circle patches (radius uniform in
/// [5, 15] px, centered on surviving edge points) until exactly
/// round(missing_rate * total) points are gone; the last circle is truncated
/// nearest-first so the removed fraction never overshoots. Deterministic in
/// seed. Throws std::invalid_argument unless 0 <= missing_rate < 1.
DirectedEdgeSet2D apply_circle_dropout(const DirectedEdgeSet2D& edges,
                                       double missing_rate, uint64_t seed);

}  // namespace occalib
