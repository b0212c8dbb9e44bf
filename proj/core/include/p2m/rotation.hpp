#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace p2m {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Axis-angle to rotation matrix. Angles below kTinyAngle use the
/// second-order Taylor expansion of sin/cos to stay finite and smooth.
Mat3 rodrigues(const Vec3& axis_angle);

inline constexpr double kTinyAngle = 1e-8;

/// Rotation matrix back to axis-angle with angle wrapped to [0, pi].
Vec3 axis_angle_from_matrix(const Mat3& R);

Quat quat_from_axis_angle(const Vec3& axis_angle);
Vec3 axis_angle_from_quat(const Quat& q);

/// Rotation about +y by `angle` radians.
Mat3 yaw_matrix(double angle);

/// Signed yaw angle of a direction's xz projection, measured from +z
/// toward +x (atan2 convention about the +y axis).
double plan_angle(const Vec3& dir);

/// Yaw rotation Y with Y * normalize(proj_xz(dir)) == +z.
/// Returns identity when the projection is shorter than `eps`.
Mat3 yaw_aligning_to_z(const Vec3& dir, double eps = 1e-6, bool* degenerate = nullptr);

/// Geodesic angle between two rotations, in [0, pi].
double rotation_distance(const Mat3& a, const Mat3& b);

bool is_rotation(const Mat3& R, double tol = 1e-9);

/// Maps the 6D rotation parameterization (first two matrix columns,
/// unconstrained) to a proper rotation via Gram-Schmidt.
Mat3 rotation_from_6d(const Eigen::Matrix<double, 6, 1>& r);
Eigen::Matrix<double, 6, 1> rotation_to_6d(const Mat3& R);

}  // namespace p2m
