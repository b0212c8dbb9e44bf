#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "p2m/rotation.hpp"

namespace p2m {

inline constexpr int kShapeDims = 10;
inline constexpr int kBodyJoints = 22;
inline constexpr int kHandJoints = 15;  // per hand
inline constexpr int kFullBodyJoints = kBodyJoints + 2 * kHandJoints;

/// Raised by operations whose inputs violate a documented precondition.
/// `field` names the offending quantity.
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(const std::string& field, const std::string& detail)
      : std::invalid_argument("dimension mismatch in '" + field + "': " + detail),
        field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Joint tree with a shape-conditioned rest pose. Rest offsets are
/// parent-relative; joint 0 is the root and its offset is the T-pose
/// root position. Immutable after construction.
struct ParametricSkeleton {
  std::vector<std::string> joint_names;
  std::vector<int> parent;                         // parent[0] == -1
  std::vector<Vec3> rest_offset;                   // meters, parent-relative
  std::vector<Eigen::Matrix<double, 3, kShapeDims>> shape_basis;
  std::vector<int> contact_joint_ids;              // default: ankles + toes

  int joint_count() const { return static_cast<int>(parent.size()); }

  /// T-pose root joint for beta = 0 (supplementary transform algebra
  /// needs it as a constant per sequence).
  Vec3 root_joint_rest() const { return rest_offset[0]; }
  Vec3 root_joint_rest(const Eigen::Matrix<double, kShapeDims, 1>& beta) const {
    return rest_offset[0] + shape_basis[0] * beta;
  }

  int joint_index(const std::string& name) const;

  /// Tree validity: parent[i] < i, single root, contact ids in range.
  void validate() const;
};

struct FullBodyPose {
  Eigen::Matrix<double, kShapeDims, 1> beta = Eigen::Matrix<double, kShapeDims, 1>::Zero();
  std::vector<Vec3> theta = std::vector<Vec3>(kBodyJoints, Vec3::Zero());  // axis-angle
  Vec3 t = Vec3::Zero();                                                   // root translation, m
  std::vector<Vec3> g = std::vector<Vec3>(2 * kHandJoints, Vec3::Zero());  // hand axis-angle

  bool finite() const;
};

struct MotionSequence {
  std::vector<FullBodyPose> frames;
  double fps = 60.0;

  int frame_count() const { return static_cast<int>(frames.size()); }
  double duration() const { return frames.empty() ? 0.0 : (frames.size() - 1) / fps; }
};

using JointPositions = std::vector<Vec3>;  // world-of-human frame, meters

/// Rest offsets displaced by shape_basis * beta, chained by per-joint
/// rotations down the tree, then translated by t.
JointPositions forward_kinematics(const ParametricSkeleton& skel, const FullBodyPose& pose);

/// Per-joint local rotation for FK: body joints draw from theta, hand
/// joints from g. Index must be < skel.joint_count().
Vec3 local_rotation(const FullBodyPose& pose, int joint);

/// Built-in deterministic 52-joint skeleton (22 body + 2x15 hand) with
/// plausible limb lengths, for tests and demos.
ParametricSkeleton toy_skeleton();

/// Skeleton definition file (schema documented in the repo README):
/// key/value text with joint names, parents, rest offsets, shape basis
/// rows and contact joint names.
ParametricSkeleton load_skeleton(const std::string& path);
void save_skeleton(const ParametricSkeleton& skel, const std::string& path);

/// FNV-1a over the canonical text serialization; motion files embed it
/// so a motion is never paired with the wrong skeleton.
std::uint64_t skeleton_hash(const ParametricSkeleton& skel);

}  // namespace p2m
