#include "occalib/edge2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "occalib/rng.hpp"

namespace occalib {

char direction_code(OcclusionDirection d) {
  switch (d) {
    case OcclusionDirection::Left: return 'L';
    case OcclusionDirection::Right: return 'R';
    case OcclusionDirection::Up: return 'U';
    case OcclusionDirection::Bottom: return 'B';
  }
  return '?';
}

std::optional<OcclusionDirection> direction_from_code(char c) {
  switch (c) {
    case 'L': return OcclusionDirection::Left;
    case 'R': return OcclusionDirection::Right;
    case 'U': return OcclusionDirection::Up;
    case 'B': return OcclusionDirection::Bottom;
  }
  return std::nullopt;
}

namespace {

PairOcclusion classify_pair(double d_first, bool first_valid, double d_second,
                            bool second_valid, double thr) {
  if (first_valid && !second_valid) return PairOcclusion::FirstOccludes;
  if (!first_valid && second_valid) return PairOcclusion::SecondOccludes;
  if (!first_valid && !second_valid) return PairOcclusion::None;
  if (d_second - d_first > thr) return PairOcclusion::FirstOccludes;
  if (d_first - d_second > thr) return PairOcclusion::SecondOccludes;
  return PairOcclusion::None;
}

}  // namespace

PixelPairLabels label_pixel_pairs(const DepthImage& depth, double occ_threshold) {
  if (occ_threshold <= 0.0) {
    throw std::invalid_argument("occ_threshold must be positive");
  }
  PixelPairLabels labels;
  labels.width = depth.width;
  labels.height = depth.height;
  labels.horizontal.assign(
      static_cast<std::size_t>(depth.width - 1) * depth.height,
      PairOcclusion::None);
  labels.vertical.assign(
      static_cast<std::size_t>(depth.width) * (depth.height - 1),
      PairOcclusion::None);

  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u + 1 < depth.width; ++u) {
      labels.horizontal[v * (depth.width - 1) + u] = classify_pair(
          depth.at(u, v), depth.valid_at(u, v), depth.at(u + 1, v),
          depth.valid_at(u + 1, v), occ_threshold);
    }
  }
  for (int v = 0; v + 1 < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      labels.vertical[v * depth.width + u] = classify_pair(
          depth.at(u, v), depth.valid_at(u, v), depth.at(u, v + 1),
          depth.valid_at(u, v + 1), occ_threshold);
    }
  }
  return labels;
}

DirectedEdgeSet2D extract_edge_points_2d(const PixelPairLabels& labels) {
  DirectedEdgeSet2D edges;
  // Horizontal pairs: foreground keeps the pixel, direction names the
  // background side. Background at larger u -> Right, smaller u -> Left.
  for (int v = 0; v < labels.height; ++v) {
    for (int u = 0; u + 1 < labels.width; ++u) {
      switch (labels.h_at(u, v)) {
        case PairOcclusion::FirstOccludes:
          edges.of(OcclusionDirection::Right).emplace_back(u, v);
          break;
        case PairOcclusion::SecondOccludes:
          edges.of(OcclusionDirection::Left).emplace_back(u + 1, v);
          break;
        case PairOcclusion::None:
          break;
      }
    }
  }
  // Vertical pairs: background at larger v -> Bottom, smaller v -> Up.
  for (int v = 0; v + 1 < labels.height; ++v) {
    for (int u = 0; u < labels.width; ++u) {
      switch (labels.v_at(u, v)) {
        case PairOcclusion::FirstOccludes:
          edges.of(OcclusionDirection::Bottom).emplace_back(u, v);
          break;
        case PairOcclusion::SecondOccludes:
          edges.of(OcclusionDirection::Up).emplace_back(u, v + 1);
          break;
        case PairOcclusion::None:
          break;
      }
    }
  }
  return edges;
}

DirectedEdgeSet2D apply_circle_dropout(const DirectedEdgeSet2D& edges,
                                       double missing_rate, uint64_t seed) {
  if (missing_rate < 0.0 || missing_rate >= 1.0) {
    throw std::invalid_argument("missing_rate must be in [0, 1)");
  }

  struct Entry {
    Eigen::Vector2i px;
    int dir;
    bool alive = true;
  };
  std::vector<Entry> entries;
  entries.reserve(edges.total());
  for (int d = 0; d < 4; ++d) {
    for (const auto& p : edges.points[d]) entries.push_back({p, d, true});
  }

  const std::size_t total = entries.size();
  const std::size_t target =
      static_cast<std::size_t>(std::llround(missing_rate * static_cast<double>(total)));

  Rng rng = Rng::substream(seed, "dropout");
  std::size_t removed = 0;
  std::vector<std::size_t> alive_idx(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) alive_idx[i] = i;

  while (removed < target && !alive_idx.empty()) {
    const std::size_t pick =
        alive_idx[rng.uniform_int(0, static_cast<int>(alive_idx.size()) - 1)];
    const Eigen::Vector2d center = entries[pick].px.cast<double>();
    const double radius = rng.uniform(5.0, 15.0);
    const double r2 = radius * radius;

    std::vector<std::pair<double, std::size_t>> inside;  // (dist^2, entry idx)
    for (const std::size_t i : alive_idx) {
      const double d2 = (entries[i].px.cast<double>() - center).squaredNorm();
      if (d2 <= r2) inside.emplace_back(d2, i);
    }
    std::sort(inside.begin(), inside.end());

    // Truncate the final circle so the removed count lands exactly on target.
    const std::size_t take = std::min(inside.size(), target - removed);
    for (std::size_t k = 0; k < take; ++k) {
      entries[inside[k].second].alive = false;
    }
    removed += take;
    std::erase_if(alive_idx, [&](std::size_t i) { return !entries[i].alive; });
  }

  DirectedEdgeSet2D out;
  for (const auto& e : entries) {
    if (e.alive) out.points[e.dir].push_back(e.px);
  }
  return out;
}

}  // namespace occalib
