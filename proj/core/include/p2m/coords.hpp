#pragma once

#include <vector>

#include "p2m/camera.hpp"
#include "p2m/skeleton.hpp"

namespace p2m {

/// Per-frame pose in the human coordinate system plus the camera pose
/// expressed relative to it.
struct HumanCentricState {
  std::vector<Vec3> theta_H = std::vector<Vec3>(kBodyJoints, Vec3::Zero());
  Vec3 t_H = Vec3::Zero();
  Mat3 R_H = Mat3::Identity();
  Vec3 T_H = Vec3::Zero();

  void validate(double tol = 1e-9) const;
};

/// Accumulated planar translation of the subject; threaded explicitly by
/// the caller so pipelines replay deterministically.
struct WorldAccumulator {
  Vec3 t_xz = Vec3::Zero();  // y component held at exactly 0
  int frame_index = 0;

  void validate() const;
};

/// How the root axis-angle is carried across the human/world yaw change.
/// kAxisRotation applies the yaw to the axis vector only (the literal
/// reading of the transform equations); kCompose composes the rotation
/// matrices, which also changes how limbs swing about the root.
enum class RootRule { kAxisRotation, kCompose };

struct RigidTransform {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
  Vec3 apply(const Vec3& p) const { return R * p + t; }
};

struct CanonicalMotion {
  MotionSequence motion;
  RigidTransform applied;  // maps original points into canonical space
};

/// Removes the frame-0 translation in the xz plane and yaws the whole
/// sequence so the frame-0 root heading points along +z. Near-vertical
/// heading falls back to the root's lateral axis.
CanonicalMotion canonicalize(const MotionSequence& motion);

/// Transforms camera extrinsics by the same rigid map canonicalize
/// applied to the motion (points p' = R p + t).
Extrinsics transform_extrinsics(const Extrinsics& extr, const RigidTransform& rigid);

/// Yaw-only rotation taking the camera forward axis in human space,
/// projected to xz, onto the +z half of the yz plane. Near-vertical
/// forward axes yield identity and set *degenerate.
Mat3 compute_r_front(const Mat3& R_H, const Vec3& T_H, bool* degenerate = nullptr);

struct WorldFrame {
  Vec3 theta_root_W = Vec3::Zero();
  Vec3 t_W = Vec3::Zero();
  Mat3 R_W = Mat3::Identity();
  Vec3 T_W = Vec3::Zero();
  Mat3 r_front = Mat3::Identity();  // the yaw used, recorded for inversion
  WorldAccumulator next;
};

/// Human-to-world transform and accumulator update:
///   R_W = R_H R_front
///   T_W = -R_W (R_front^T (-R_H^T T_H) + t_xz)
///   theta_W(root) = R_front^T theta_H(root)
///   t_W = R_front^T (t_H + J_root) - J_root + t_xz
///   t_xz' = t_xz + R_front^T t_H   (y zeroed)
/// R_front is derived from the state's camera via compute_r_front.
WorldFrame human_to_world(const HumanCentricState& state, const WorldAccumulator& acc,
                          const Vec3& J_root, RootRule rule = RootRule::kAxisRotation);

/// Same equations with a caller-supplied yaw (used when the anchor is
/// known exactly, e.g. ground-truth label replay).
WorldFrame human_to_world_with(const HumanCentricState& state, const WorldAccumulator& acc,
                               const Vec3& J_root, const Mat3& r_front,
                               RootRule rule = RootRule::kAxisRotation);

/// Exact inverse of human_to_world_with given the recorded r_front and
/// the accumulator value *before* the frame.
HumanCentricState world_to_human(const WorldFrame& world, const WorldAccumulator& acc,
                                 const Vec3& J_root, RootRule rule = RootRule::kAxisRotation);

/// Ground-truth label construction: per-frame human-centric states for a
/// motion observed by a camera trajectory. (theta_H, t_H) depend only on
/// the motion, so sequences observed by different cameras share them;
/// (R_H, T_H) carry the per-camera pose. The anchor yaw is identity, so
/// replaying the labels through human_to_world_with(.., identity)
/// reproduces the input motion exactly.
struct LabeledStates {
  std::vector<HumanCentricState> states;
  std::vector<WorldAccumulator> acc_before;  // accumulator entering each frame
};
LabeledStates human_centric_labels(const MotionSequence& motion, const CameraTrajectory& camera,
                                   const Vec3& J_root);

}  // namespace p2m
