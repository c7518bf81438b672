#include "occalib/optim.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace occalib {

const char* calib_status_name(CalibStatus s) {
  switch (s) {
    case CalibStatus::Converged: return "converged";
    case CalibStatus::InsufficientFeatures: return "insufficient_features";
    case CalibStatus::Diverged: return "diverged";
  }
  return "?";
}

double point_to_line_residual(const Eigen::Vector2d& p, const CandidateLine& line) {
  return line.normal.dot(p - line.center);
}

double huber_cost(double r, double delta) {
  const double a = std::abs(r);
  if (a <= delta) return r * r;
  return 2.0 * delta * a - delta * delta;
}

double huber_weight(double r, double delta) {
  const double a = std::abs(r);
  if (a <= delta) return 1.0;
  return delta / a;
}

std::optional<Eigen::Matrix<double, 6, 1>> residual_jacobian(
    const Twist& xi, const Eigen::Vector3d& P, const CandidateLine& line,
    const PinholeCamera& cam) {
  const Eigen::Vector3d X = exp_map(xi) * P;
  if (X.z() <= kMinDepth) return std::nullopt;

  const double inv_z = 1.0 / X.z();
  Eigen::Matrix<double, 2, 3> J_proj;
  // clang-format off
  J_proj << cam.fx * inv_z, 0.0,            -cam.fx * X.x() * inv_z * inv_z,
            0.0,            cam.fy * inv_z, -cam.fy * X.y() * inv_z * inv_z;
  // clang-format on

  // Left-composed increment: dX/d(rot) = -[X]_x, dX/d(trans) = I.
  const Eigen::RowVector3d nJ = line.normal.transpose() * J_proj;
  Eigen::Matrix<double, 6, 1> J;
  J.head<3>() = (-nJ * skew(X)).transpose();
  J.tail<3>() = nJ.transpose();
  return J;
}

namespace {

Twist compose_increment(const Eigen::Matrix<double, 6, 1>& delta, const Twist& xi) {
  Twist inc;
  inc.rot_vec = delta.head<3>();
  inc.trans_vec = delta.tail<3>();
  return log_map(exp_map(inc) * exp_map(xi));
}

/// Robust cost over matches; +inf when any match falls behind the camera so
/// such a step is rejected outright.
double robust_cost(const std::vector<MatchPair>& matches, const PinholeCamera& cam,
                   const Twist& xi, double delta) {
  const RigidTransform T = exp_map(xi);
  double cost = 0.0;
  for (const auto& m : matches) {
    const Eigen::Vector3d X = T * m.point;
    if (X.z() <= kMinDepth) return std::numeric_limits<double>::infinity();
    const Eigen::Vector2d p(cam.fx * X.x() / X.z() + cam.cx,
                            cam.fy * X.y() / X.z() + cam.cy);
    cost += huber_cost(point_to_line_residual(p, m.line), delta);
  }
  return cost;
}

}  // namespace

LmResult lm_solve(const std::vector<MatchPair>& matches, const PinholeCamera& cam,
                  const Twist& xi0, const CalibParams& params) {
  LmResult result;
  result.xi = xi0;
  if (static_cast<int>(matches.size()) < params.min_pairs) {
    result.status = CalibStatus::InsufficientFeatures;
    return result;
  }

  double cost = robust_cost(matches, cam, xi0, params.huber_delta);
  if (!std::isfinite(cost)) {
    result.status = CalibStatus::Diverged;
    return result;
  }

  double lambda = params.lm_lambda_init;
  Twist xi = xi0;

  for (int iter = 0; iter < params.lm_max_iters; ++iter) {
    result.iterations = iter + 1;

    Eigen::Matrix<double, 6, 6> H = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    const RigidTransform T = exp_map(xi);
    for (const auto& m : matches) {
      const Eigen::Vector3d X = T * m.point;
      if (X.z() <= kMinDepth) continue;
      const Eigen::Vector2d p(cam.fx * X.x() / X.z() + cam.cx,
                              cam.fy * X.y() / X.z() + cam.cy);
      const double r = point_to_line_residual(p, m.line);
      const auto J = residual_jacobian(xi, m.point, m.line, cam);
      if (!J) continue;
      const double w = huber_weight(r, params.huber_delta);
      H.noalias() += w * (*J) * J->transpose();
      g.noalias() += w * (*J) * r;
    }

    if (g.lpNorm<Eigen::Infinity>() < 1e-14) break;  // stationary

    bool accepted = false;
    while (lambda <= 1e12) {
      Eigen::Matrix<double, 6, 6> damped = H;
      for (int i = 0; i < 6; ++i) {
        damped(i, i) += lambda * std::max(H(i, i), 1e-12);
      }
      const Eigen::Matrix<double, 6, 1> delta = damped.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda *= 10.0;
        continue;
      }

      const Twist cand = compose_increment(delta, xi);
      const double cand_cost = robust_cost(matches, cam, cand, params.huber_delta);
      if (std::isfinite(cand_cost) && cand_cost < cost) {
        const double improvement = (cost - cand_cost) / std::max(cost, 1e-300);
        xi = cand;
        cost = cand_cost;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        if (delta.norm() < params.step_tol || improvement < params.rel_cost_tol) {
          result.xi = xi;
          result.final_cost = cost;
          return result;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) break;  // damping exhausted
  }

  result.xi = xi;
  result.final_cost = cost;
  return result;
}

MultiFrameContext accumulate_frames(const std::vector<FrameFeatures>& frames) {
  MultiFrameContext context;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].edges2d.total() == 0 || frames[i].features3d.total() == 0) {
      std::fprintf(stderr, "warning: frame %zu has no features, skipping\n", i);
      ++context.skipped_frames;
      continue;
    }
    context.frames.push_back(
        {DirectionIndex(frames[i].edges2d), frames[i].features3d});
  }
  return context;
}

namespace {

std::vector<MatchPair> associate_all(const MultiFrameContext& context,
                                     const PinholeCamera& cam, const Twist& xi,
                                     const MatchParams& mp, bool guided) {
  std::vector<MatchPair> all;
  for (const auto& frame : context.frames) {
    auto m = associate(frame.features3d, frame.index, xi, cam, mp, guided);
    all.insert(all.end(), m.begin(), m.end());
  }
  return all;
}

}  // namespace

CalibrationResult calibrate_frames(const MultiFrameContext& context,
                                   const PinholeCamera& cam, const Twist& xi0,
                                   const CalibParams& params) {
  CalibrationResult result;
  result.status = CalibStatus::Converged;

  Twist xi = xi0;
  double d_c = params.d_c_init;
  MatchParams mp = params.match;

  for (int iter = 1; iter <= params.n_opt; ++iter) {
    mp.d_c = d_c;
    const std::vector<MatchPair> matches =
        associate_all(context, cam, xi, mp, params.direction_guided);

    IterationRecord rec;
    rec.iter = iter;
    rec.d_c = d_c;
    rec.pairs = static_cast<int>(matches.size());
    if (!matches.empty()) {
      const RigidTransform T = exp_map(xi);
      double sum = 0.0;
      for (const auto& m : matches) {
        const Eigen::Vector3d X = T * m.point;
        const Eigen::Vector2d p(cam.fx * X.x() / X.z() + cam.cx,
                                cam.fy * X.y() / X.z() + cam.cy);
        sum += std::abs(point_to_line_residual(p, m.line));
      }
      rec.mean_abs_residual = sum / static_cast<double>(matches.size());
    }
    result.trace.push_back(rec);

    if (static_cast<int>(matches.size()) < params.min_pairs) {
      result.status = CalibStatus::InsufficientFeatures;
      break;
    }

    const LmResult lm = lm_solve(matches, cam, xi, params);
    if (lm.status == CalibStatus::Diverged) {
      result.status = CalibStatus::Diverged;
      break;
    }
    xi = lm.xi;
    d_c = std::max(d_c * params.d_c_decay, params.d_c_floor);
  }

  result.final_twist = xi;
  result.final_transform = exp_map(xi);
  return result;
}

CalibrationResult calibrate(const DirectedEdgeSet2D& edges2d,
                            const DirectedEdgeSet3D& features3d,
                            const PinholeCamera& cam, const Twist& xi0,
                            const CalibParams& params) {
  MultiFrameContext context;
  if (edges2d.total() > 0 && features3d.total() > 0) {
    context.frames.push_back({DirectionIndex(edges2d), features3d});
  }
  return calibrate_frames(context, cam, xi0, params);
}

Twist grid_search_init(const MultiFrameContext& context, const PinholeCamera& cam,
                       const Twist& xi0, double rot_res_deg, double trans_res_m,
                       double rot_span_deg, double trans_span_m,
                       const CalibParams& params) {
  struct Score {
    int pairs = -1;
    double cost = std::numeric_limits<double>::infinity();

    bool better_than(const Score& o) const {
      if (pairs != o.pairs) return pairs > o.pairs;
      return cost < o.cost;
    }
  };

  MatchParams mp = params.match;
  mp.d_c = params.d_c_init;

  const auto score_of = [&](const Twist& xi) {
    const auto matches = associate_all(context, cam, xi, mp, params.direction_guided);
    Score s;
    s.pairs = static_cast<int>(matches.size());
    s.cost = robust_cost(matches, cam, xi, params.huber_delta);
    return s;
  };

  const auto axis_value = [](const Twist& xi, int axis) {
    return axis < 3 ? xi.rot_vec[axis] : xi.trans_vec[axis - 3];
  };
  const auto with_axis = [](Twist xi, int axis, double value) {
    if (axis < 3) {
      xi.rot_vec[axis] = value;
    } else {
      xi.trans_vec[axis - 3] = value;
    }
    return xi;
  };

  Twist best = xi0;
  Score best_score = score_of(best);

  const double rot_res = deg2rad(rot_res_deg);
  const double rot_span = deg2rad(rot_span_deg);
  const int max_passes = 3;

  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (int axis = 0; axis < 6; ++axis) {
      const double res = axis < 3 ? rot_res : trans_res_m;
      const double span = axis < 3 ? rot_span : trans_span_m;
      const double anchor = axis_value(xi0, axis);
      const int steps = static_cast<int>(std::floor(span / res + 1e-9));

      for (int k = -steps; k <= steps; ++k) {
        const double value = anchor + k * res;
        if (value == axis_value(best, axis)) continue;
        const Twist cand = with_axis(best, axis, value);
        const Score s = score_of(cand);
        if (s.better_than(best_score)) {
          best = cand;
          best_score = s;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return best;
}

}  // namespace occalib
