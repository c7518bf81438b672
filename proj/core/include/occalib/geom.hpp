#pragma once

#include <Eigen/Core>

#include <optional>

namespace occalib {

// Shared numeric thresholds. All modules use the same small-angle cutoff so
// series fallbacks agree across exp/log/jacobian code paths.
inline constexpr double kSmallAngle = 1e-8;
inline constexpr double kMinDepth = 1e-6;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// SE(3) element: x_out = rotation * x + translation.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }

  RigidTransform inverse() const {
    RigidTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
  }

  RigidTransform operator*(const RigidTransform& rhs) const {
    RigidTransform out;
    out.rotation = rotation * rhs.rotation;
    out.translation = rotation * rhs.translation + translation;
    return out;
  }

  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  /// Orthonormality and det(R)=1, elementwise within tol.
  bool is_valid(double tol = 1e-9) const;
};

/// se(3) tangent element: axis-angle rotation plus translation parameters.
/// Canonical representatives keep ||rot_vec|| < pi.
struct Twist {
  Eigen::Vector3d rot_vec = Eigen::Vector3d::Zero();    // radians
  Eigen::Vector3d trans_vec = Eigen::Vector3d::Zero();  // meters
};

/// Rectified pinhole model, pixel coordinates at integer pixel centers.
struct PinholeCamera {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  bool is_valid() const {
    return fx > 0.0 && fy > 0.0 && cx >= 0.0 && cx < width && cy >= 0.0 &&
           cy < height;
  }

  bool in_image(const Eigen::Vector2d& px) const {
    return px.x() >= 0.0 && px.x() < width && px.y() >= 0.0 && px.y() < height;
  }
};

/// Plane normal . x = offset with unit normal. Used for the RANSAC ground
/// plane and as the analytic ground surface of simulated scenes.
struct PlaneModel {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;

  double signed_distance(const Eigen::Vector3d& p) const {
    return normal.dot(p) - offset;
  }
};

Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// Exponential map se(3) -> SE(3): Rodrigues rotation and V-matrix translation.
/// Angles below kSmallAngle use the second-order series (no 1/theta).
RigidTransform exp_map(const Twist& xi);

/// Logarithm map SE(3) -> se(3), rotation angle in [0, pi]. Angles at or near
/// pi go through the axis-extraction branch on (R + R^T)/2.
Twist log_map(const RigidTransform& T);

/// Pixel of camera-frame point X; empty when X.z() <= kMinDepth.
/// Out-of-bounds pixels are returned; callers filter with cam.in_image().
std::optional<Eigen::Vector2d> project_point(const PinholeCamera& cam,
                                             const Eigen::Vector3d& X);

/// Pixel of LiDAR-frame point P seen through exp_map(xi).
std::optional<Eigen::Vector2d> project(const PinholeCamera& cam,
                                       const Twist& xi,
                                       const Eigen::Vector3d& P);

}  // namespace occalib
