#include "p2m/rotation.hpp"

#include <cmath>

namespace p2m {

Mat3 rodrigues(const Vec3& aa) {
  const double theta2 = aa.squaredNorm();
  Mat3 K;
  K << 0, -aa.z(), aa.y(), aa.z(), 0, -aa.x(), -aa.y(), aa.x(), 0;
  if (theta2 < kTinyAngle * kTinyAngle) {
    // sin(t)/t ~ 1 - t^2/6, (1-cos(t))/t^2 ~ 1/2 - t^2/24
    const double a = 1.0 - theta2 / 6.0;
    const double b = 0.5 - theta2 / 24.0;
    return Mat3::Identity() + a * K + b * (K * K);
  }
  const double theta = std::sqrt(theta2);
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / theta2;
  return Mat3::Identity() + a * K + b * (K * K);
}

Vec3 axis_angle_from_matrix(const Mat3& R) {
  Eigen::AngleAxisd aa(R);
  double angle = aa.angle();
  Vec3 axis = aa.axis();
  // Eigen returns angle in [0, pi] already; wrap defensively.
  if (angle > M_PI) {
    angle = 2.0 * M_PI - angle;
    axis = -axis;
  }
  if (angle < 0) {
    angle = -angle;
    axis = -axis;
  }
  return axis * angle;
}

Quat quat_from_axis_angle(const Vec3& aa) {
  const double theta = aa.norm();
  if (theta < kTinyAngle) {
    Quat q(1.0, 0.5 * aa.x(), 0.5 * aa.y(), 0.5 * aa.z());
    q.normalize();
    return q;
  }
  return Quat(Eigen::AngleAxisd(theta, aa / theta));
}

Vec3 axis_angle_from_quat(const Quat& q_in) {
  Quat q = q_in.normalized();
  if (q.w() < 0) q.coeffs() = -q.coeffs();
  const double sin_half = q.vec().norm();
  if (sin_half < kTinyAngle) return 2.0 * q.vec();
  const double angle = 2.0 * std::atan2(sin_half, q.w());
  return q.vec() / sin_half * angle;
}

Mat3 yaw_matrix(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 Y;
  Y << c, 0, s, 0, 1, 0, -s, 0, c;
  return Y;
}

double plan_angle(const Vec3& dir) { return std::atan2(dir.x(), dir.z()); }

Mat3 yaw_aligning_to_z(const Vec3& dir, double eps, bool* degenerate) {
  const double len = std::hypot(dir.x(), dir.z());
  if (degenerate) *degenerate = len < eps;
  if (len < eps) return Mat3::Identity();
  // yaw_matrix(a) maps +z to (sin a, 0, cos a); align by rotating back.
  return yaw_matrix(-plan_angle(dir));
}

double rotation_distance(const Mat3& a, const Mat3& b) {
  const double c = ((a.transpose() * b).trace() - 1.0) * 0.5;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

bool is_rotation(const Mat3& R, double tol) {
  return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() < tol &&
         std::abs(R.determinant() - 1.0) < tol;
}

Mat3 rotation_from_6d(const Eigen::Matrix<double, 6, 1>& r) {
  Vec3 a1 = r.head<3>();
  Vec3 a2 = r.tail<3>();
  Vec3 b1 = a1.normalized();
  Vec3 b2 = (a2 - b1.dot(a2) * b1).normalized();
  Vec3 b3 = b1.cross(b2);
  Mat3 R;
  R.col(0) = b1;
  R.col(1) = b2;
  R.col(2) = b3;
  return R;
}

Eigen::Matrix<double, 6, 1> rotation_to_6d(const Mat3& R) {
  Eigen::Matrix<double, 6, 1> r;
  r.head<3>() = R.col(0);
  r.tail<3>() = R.col(1);
  return r;
}

}  // namespace p2m
