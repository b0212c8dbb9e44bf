#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "p2m/rotation.hpp"

namespace p2m {

struct Intrinsics {
  double focal = 0.0;          // pixels
  Vec2 principal_point{0, 0};  // pixels
  Vec2 image_size{1920, 1080};
  double fov_deg = 0.0;        // vertical

  /// focal = 0.5 * H / tan(fov/2), principal point at the image center.
  static Intrinsics from_fov(double fov_deg, const Vec2& image_size = Vec2(1920, 1080));
  bool consistent(double tol = 1e-6) const;
};

struct Extrinsics {
  Mat3 R = Mat3::Identity();  // world -> camera
  Vec3 T = Vec3::Zero();      // meters

  Vec3 center() const { return -R.transpose() * T; }
  Vec3 forward() const { return R.row(2).transpose(); }  // +z of the camera, in world

  /// Camera at `eye` looking at `target`, +y up. Falls back to the x
  /// axis as up reference when the view direction is near vertical.
  static Extrinsics look_at(const Vec3& eye, const Vec3& target);
};

struct CameraTrajectory {
  Intrinsics intrinsics;
  std::vector<Extrinsics> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }
};

struct Projection {
  Vec2 pixel{0, 0};
  bool valid = false;  // false when depth <= 0 (caller decides masking)
  double depth = 0.0;
};

/// p_cam = R p + T; (u, v) = focal (x/z, y/z) + principal_point.
Projection project_point(const Vec3& point, const Intrinsics& intr, const Extrinsics& extr);
std::vector<Projection> project(const std::vector<Vec3>& points, const Intrinsics& intr,
                                const Extrinsics& extr);

/// Inverse of project_point at a given camera depth z > 0.
Vec3 lift_point(const Vec2& pixel, double depth, const Intrinsics& intr, const Extrinsics& extr);

struct TrajectoryRanges {
  double fov_min_deg = 30.0, fov_max_deg = 90.0;
  double dist_min = 1.0, dist_max = 5.0;      // meters, to subject centroid
  double height_min = 0.5, height_max = 2.0;  // meters above ground
  int waypoints = 4;
  Vec2 image_size{1920, 1080};
};

/// Virtual hand-held style trajectory: FOV ~ U[30, 90] deg; camera kept
/// at distance U[1, 5] m from the subject at height U[0.5, 2] m, moving
/// smoothly between sampled waypoints and looking at the subject root
/// track smoothed by a 1 s box filter. Deterministic given seed.
CameraTrajectory sample_trajectory(std::uint64_t rng_seed, int num_frames,
                                   const std::vector<Vec3>& subject_centroid_track,
                                   double fps = 60.0,
                                   const TrajectoryRanges& ranges = TrajectoryRanges{});

/// The smoothed look-at track used by sample_trajectory (exposed for tests).
std::vector<Vec3> box_filter_track(const std::vector<Vec3>& track, int half_window);

}  // namespace p2m
