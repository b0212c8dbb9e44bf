#include "p2m/coords.hpp"

#include <cmath>
#include <stdexcept>

namespace p2m {

void HumanCentricState::validate(double tol) const {
  if (!is_rotation(R_H, tol)) throw std::invalid_argument("HumanCentricState: R_H is not a rotation");
  if (!T_H.allFinite() || !t_H.allFinite()) throw std::invalid_argument("HumanCentricState: non-finite");
}

void WorldAccumulator::validate() const {
  if (t_xz.y() != 0.0) throw std::invalid_argument("WorldAccumulator: t_xz.y must be exactly 0");
}

CanonicalMotion canonicalize(const MotionSequence& motion) {
  if (motion.frames.empty()) throw std::invalid_argument("canonicalize: empty motion");

  const FullBodyPose& first = motion.frames.front();
  const Mat3 root0 = rodrigues(first.theta[0]);
  bool degenerate = false;
  Mat3 yaw = yaw_aligning_to_z(root0.col(2), 1e-6, &degenerate);
  if (degenerate) yaw = yaw_aligning_to_z(root0.col(0), 1e-6);  // lateral-axis tie-break

  const Vec3 pivot(first.t.x(), 0.0, first.t.z());

  CanonicalMotion out;
  out.applied.R = yaw;
  out.applied.t = -yaw * pivot;
  out.motion.fps = motion.fps;
  out.motion.frames.reserve(motion.frames.size());
  for (const FullBodyPose& f : motion.frames) {
    FullBodyPose g = f;
    g.t = yaw * (f.t - pivot);
    g.theta[0] = axis_angle_from_matrix(yaw * rodrigues(f.theta[0]));
    out.motion.frames.push_back(std::move(g));
  }
  return out;
}

Extrinsics transform_extrinsics(const Extrinsics& extr, const RigidTransform& rigid) {
  // p' = rigid.R p + rigid.t, so cam(p') must equal cam(p).
  Extrinsics out;
  out.R = extr.R * rigid.R.transpose();
  out.T = extr.T - out.R * rigid.t;
  return out;
}

Mat3 compute_r_front(const Mat3& R_H, const Vec3& /*T_H*/, bool* degenerate) {
  const Vec3 forward = R_H.row(2).transpose();  // camera +z in human space
  return yaw_aligning_to_z(forward, 1e-6, degenerate);
}

namespace {

Vec3 carry_root(const Vec3& theta_root, const Mat3& rot, RootRule rule) {
  if (rule == RootRule::kAxisRotation) return rot * theta_root;
  Vec3 aa = axis_angle_from_matrix(rot * rodrigues(theta_root));
  return aa;
}

}  // namespace

WorldFrame human_to_world_with(const HumanCentricState& state, const WorldAccumulator& acc,
                               const Vec3& J_root, const Mat3& r_front, RootRule rule) {
  state.validate();
  acc.validate();

  WorldFrame w;
  w.r_front = r_front;
  const Mat3 rf_t = r_front.transpose();
  w.R_W = state.R_H * r_front;
  w.T_W = -w.R_W * (rf_t * (-state.R_H.transpose() * state.T_H) + acc.t_xz);
  w.theta_root_W = carry_root(state.theta_H[0], rf_t, rule);
  w.t_W = rf_t * (state.t_H + J_root) - J_root + acc.t_xz;

  w.next = acc;
  w.next.t_xz += rf_t * state.t_H;
  w.next.t_xz.y() = 0.0;  // zeroed every update to stop numerical drift
  w.next.frame_index = acc.frame_index + 1;
  return w;
}

WorldFrame human_to_world(const HumanCentricState& state, const WorldAccumulator& acc,
                          const Vec3& J_root, RootRule rule) {
  const Mat3 r_front = compute_r_front(state.R_H, state.T_H);
  return human_to_world_with(state, acc, J_root, r_front, rule);
}

HumanCentricState world_to_human(const WorldFrame& world, const WorldAccumulator& acc,
                                 const Vec3& J_root, RootRule rule) {
  acc.validate();
  const Mat3& rf = world.r_front;
  HumanCentricState s;
  s.R_H = world.R_W * rf.transpose();
  s.T_H = world.T_W + world.R_W * acc.t_xz;
  s.theta_H[0] = carry_root(world.theta_root_W, rf, rule);
  s.t_H = rf * (world.t_W + J_root - acc.t_xz) - J_root;
  return s;
}

LabeledStates human_centric_labels(const MotionSequence& motion, const CameraTrajectory& camera,
                                   const Vec3& J_root) {
  if (camera.frame_count() != motion.frame_count())
    throw std::invalid_argument("human_centric_labels: camera/motion frame count mismatch");
  (void)J_root;  // with an identity anchor the J_root terms cancel

  LabeledStates out;
  out.states.resize(motion.frame_count());
  out.acc_before.resize(motion.frame_count());

  WorldAccumulator acc;
  for (int f = 0; f < motion.frame_count(); ++f) {
    const FullBodyPose& pose = motion.frames[f];
    HumanCentricState& s = out.states[f];
    s.theta_H = pose.theta;
    s.t_H = pose.t - acc.t_xz;
    s.R_H = camera.frames[f].R;
    s.T_H = camera.frames[f].T + camera.frames[f].R * acc.t_xz;
    out.acc_before[f] = acc;

    acc.t_xz += s.t_H;
    acc.t_xz.y() = 0.0;
    acc.frame_index = f + 1;
  }
  return out;
}

}  // namespace p2m
