#include "occalib/geom.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace occalib {

bool RigidTransform::is_valid(double tol) const {
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  if (((gram - Eigen::Matrix3d::Identity()).array().abs() > tol).any()) {
    return false;
  }
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  // clang-format off
  m <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

RigidTransform exp_map(const Twist& xi) {
  const double theta = xi.rot_vec.norm();
  const Eigen::Matrix3d omega = skew(xi.rot_vec);
  const Eigen::Matrix3d omega2 = omega * omega;
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();

  RigidTransform T;
  if (theta < kSmallAngle) {
    T.rotation = I + omega + 0.5 * omega2;
    const Eigen::Matrix3d V = I + 0.5 * omega + omega2 / 6.0;
    T.translation = V * xi.trans_vec;
    return T;
  }

  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double t2 = theta * theta;
  T.rotation = I + (s / theta) * omega + ((1.0 - c) / t2) * omega2;
  const Eigen::Matrix3d V =
      I + ((1.0 - c) / t2) * omega + ((theta - s) / (t2 * theta)) * omega2;
  T.translation = V * xi.trans_vec;
  return T;
}

namespace {

// Rotation angle near pi: the skew part of R vanishes, so recover the axis
// from aa^T = ((R + R^T)/2 - cos(theta) I) / (1 - cos(theta)).
Eigen::Vector3d axis_near_pi(const Eigen::Matrix3d& R, double cos_theta) {
  const Eigen::Matrix3d outer =
      ((R + R.transpose()) * 0.5 - cos_theta * Eigen::Matrix3d::Identity()) /
      (1.0 - cos_theta);
  int j = 0;
  outer.diagonal().maxCoeff(&j);
  Eigen::Vector3d axis = outer.col(j) / std::sqrt(outer(j, j));
  axis.normalize();

  // Keep continuity with the skew part while it is still nonzero; at exactly
  // pi both signs are valid and we pick a canonical one.
  const Eigen::Vector3d skew_part(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0),
                                  R(1, 0) - R(0, 1));
  if (skew_part.norm() > 1e-12) {
    if (skew_part.dot(axis) < 0.0) axis = -axis;
  } else {
    for (int i = 0; i < 3; ++i) {
      if (std::abs(axis[i]) > 1e-12) {
        if (axis[i] < 0.0) axis = -axis;
        break;
      }
    }
  }
  return axis;
}

}  // namespace

Twist log_map(const RigidTransform& T) {
  const Eigen::Matrix3d& R = T.rotation;
  const double cos_theta = std::clamp((R.trace() - 1.0) * 0.5, -1.0, 1.0);

  const Eigen::Vector3d skew_part(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0),
                                  R(1, 0) - R(0, 1));
  // atan2 of (|sin|, cos) stays well-conditioned at both ends of [0, pi],
  // unlike acos(cos_theta) whose error blows up to sqrt(eps) near pi.
  const double sin_theta = 0.5 * skew_part.norm();
  const double theta = std::atan2(sin_theta, cos_theta);

  Twist xi;
  if (theta < kSmallAngle) {
    xi.rot_vec = 0.5 * skew_part;
  } else if (theta > kPi - 1e-6) {
    xi.rot_vec = theta * axis_near_pi(R, cos_theta);
  } else {
    xi.rot_vec = (theta / (2.0 * std::sin(theta))) * skew_part;
  }

  const Eigen::Matrix3d omega = skew(xi.rot_vec);
  const Eigen::Matrix3d omega2 = omega * omega;
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d V_inv;
  if (theta < kSmallAngle) {
    V_inv = I - 0.5 * omega + omega2 / 12.0;
  } else {
    const double t2 = theta * theta;
    V_inv = I - 0.5 * omega +
            ((1.0 - theta * std::sin(theta) / (2.0 * (1.0 - std::cos(theta)))) /
             t2) *
                omega2;
  }
  xi.trans_vec = V_inv * T.translation;
  return xi;
}

std::optional<Eigen::Vector2d> project_point(const PinholeCamera& cam,
                                             const Eigen::Vector3d& X) {
  if (X.z() <= kMinDepth) return std::nullopt;
  return Eigen::Vector2d(cam.fx * X.x() / X.z() + cam.cx,
                         cam.fy * X.y() / X.z() + cam.cy);
}

std::optional<Eigen::Vector2d> project(const PinholeCamera& cam,
                                       const Twist& xi,
                                       const Eigen::Vector3d& P) {
  return project_point(cam, exp_map(xi) * P);
}

}  // namespace occalib
