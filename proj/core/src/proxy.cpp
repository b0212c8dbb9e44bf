#include "p2m/proxy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace p2m {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 over the combined value
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void ProxySequence::validate() const {
  const int f = frame_count();
  if (static_cast<int>(joints2d.size()) != f * keypoints ||
      static_cast<int>(confidence.size()) != f * keypoints ||
      static_cast<int>(contact.size()) != f * contact_joints)
    throw std::invalid_argument("ProxySequence: inconsistent frame counts across fields");
  if (camera.frame_count() != f)
    throw std::invalid_argument("ProxySequence: camera frame count mismatch");
  for (double c : contact)
    if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("ProxySequence: contact outside [0,1]");
  for (std::uint8_t c : confidence)
    if (c > 1) throw std::invalid_argument("ProxySequence: confidence must be binary");
}

namespace {

FullBodyPose interpolate_pose(const FullBodyPose& a, const FullBodyPose& b, double alpha) {
  if (alpha < 1e-12) return a;
  if (alpha > 1.0 - 1e-12) return b;
  FullBodyPose out = a;
  out.t = (1.0 - alpha) * a.t + alpha * b.t;
  for (size_t j = 0; j < a.theta.size(); ++j) {
    const Quat q = quat_from_axis_angle(a.theta[j]).slerp(alpha, quat_from_axis_angle(b.theta[j]));
    out.theta[j] = axis_angle_from_quat(q);
  }
  for (size_t j = 0; j < a.g.size(); ++j) {
    const Quat q = quat_from_axis_angle(a.g[j]).slerp(alpha, quat_from_axis_angle(b.g[j]));
    out.g[j] = axis_angle_from_quat(q);
  }
  return out;
}

}  // namespace

FullBodyPose sample_pose(const MotionSequence& motion, double seconds) {
  if (motion.frames.empty()) throw std::invalid_argument("sample_pose: empty motion");
  const double s = seconds * motion.fps;
  if (s <= 0.0) return motion.frames.front();
  if (s >= motion.frame_count() - 1) return motion.frames.back();
  const int i = static_cast<int>(s);
  return interpolate_pose(motion.frames[i], motion.frames[i + 1], s - i);
}

MotionSequence resample_motion(const MotionSequence& motion, double target_fps) {
  if (motion.frames.empty()) throw std::invalid_argument("resample_motion: empty motion");
  if (target_fps <= 0) throw std::invalid_argument("resample_motion: target_fps must be positive");

  MotionSequence out;
  out.fps = target_fps;
  const int frames = 1 + static_cast<int>(std::floor((motion.frame_count() - 1) *
                                                         (target_fps / motion.fps) +
                                                     1e-9));
  out.frames.reserve(frames);
  for (int k = 0; k < frames; ++k) {
    const double s = k * motion.fps / target_fps;
    const int i = std::min(static_cast<int>(s), motion.frame_count() - 2);
    if (motion.frame_count() == 1) {
      out.frames.push_back(motion.frames[0]);
    } else {
      out.frames.push_back(interpolate_pose(motion.frames[i], motion.frames[i + 1], s - i));
    }
  }
  return out;
}

MotionSequence integrate_hands(const MotionSequence& body_motion, const MotionSequence& hand_clip,
                               std::uint64_t rng_seed) {
  if (std::abs(hand_clip.fps - 30.0) > 1e-9)
    throw std::invalid_argument("integrate_hands: hand clip must be 30 fps");
  if (std::abs(body_motion.fps - 60.0) > 1e-9)
    throw std::invalid_argument("integrate_hands: body motion must be 60 fps");
  if (hand_clip.duration() < 0.5)
    throw std::invalid_argument("integrate_hands: hand clip shorter than 0.5 s");

  std::mt19937_64 rng(rng_seed);
  const double target_fps[3] = {40.0, 50.0, 60.0};
  const MotionSequence hands =
      resample_motion(hand_clip, target_fps[std::uniform_int_distribution<int>(0, 2)(rng)]);

  const double body_dur = body_motion.duration();
  const double hand_dur = hands.duration();
  double hand_start = 0.0, body_start = 0.0;
  if (hand_dur >= body_dur) {
    hand_start = std::uniform_real_distribution<double>(0.0, hand_dur - body_dur)(rng);
  } else {
    body_start = std::uniform_real_distribution<double>(0.0, body_dur - hand_dur)(rng);
  }

  MotionSequence out = body_motion;
  for (int f = 0; f < out.frame_count(); ++f) {
    const double t = f / out.fps;
    const double hand_t = std::clamp(t - body_start + hand_start, 0.0, hand_dur);
    out.frames[f].g = sample_pose(hands, hand_t).g;
  }
  return out;
}

void add_joint_noise(JointPositions& joints, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0) return;
  std::normal_distribution<double> gauss(0.0, sigma);
  for (Vec3& p : joints)
    for (int c = 0; c < 3; ++c) p[c] += gauss(rng);
}

SynthesisResult synthesize_proxy(const ParametricSkeleton& skel, const MotionSequence& motion,
                                 const SynthesisOptions& options, const std::string& source_id) {
  if (motion.frames.empty()) throw std::invalid_argument("synthesize_proxy: empty motion");
  if (std::abs(motion.fps - 60.0) > 1e-9)
    throw std::invalid_argument("synthesize_proxy: motion must be resampled to 60 fps first");

  const MotionSequence canon = canonicalize(motion).motion;
  const int frames = canon.frame_count();

  std::vector<JointPositions> joints(frames);
  std::vector<Vec3> root_track(frames);
  for (int f = 0; f < frames; ++f) {
    joints[f] = forward_kinematics(skel, canon.frames[f]);
    root_track[f] = joints[f][0];
  }
  const auto contacts = label_contacts(skel, canon, options.contact);
  const Vec3 j_root = skel.root_joint_rest(canon.frames[0].beta);

  std::vector<int> kp_map = options.keypoint_map;
  if (kp_map.empty()) {
    kp_map.resize(skel.joint_count());
    for (int i = 0; i < skel.joint_count(); ++i) kp_map[i] = i;
  }
  for (int j : kp_map)
    if (j < 0 || j >= skel.joint_count())
      throw std::invalid_argument("synthesize_proxy: keypoint_map index out of range");

  SynthesisResult result;
  for (int cam = 0; cam < options.num_cameras; ++cam) {
    const CameraTrajectory traj = sample_trajectory(derive_seed(options.seed, 2 * cam), frames,
                                                    root_track, canon.fps, options.camera_ranges);
    std::mt19937_64 noise_rng(derive_seed(options.seed, 2 * cam + 1));

    ProxySequence seq;
    seq.source_id = source_id;
    seq.fps = canon.fps;
    seq.keypoints = static_cast<int>(kp_map.size());
    seq.contact_joints = static_cast<int>(skel.contact_joint_ids.size());
    seq.camera = traj;
    seq.joints2d.resize(static_cast<size_t>(frames) * seq.keypoints, {0.0, 0.0});
    seq.confidence.resize(static_cast<size_t>(frames) * seq.keypoints, 0);
    seq.contact.reserve(static_cast<size_t>(frames) * seq.contact_joints);
    for (int f = 0; f < frames; ++f)
      for (int c = 0; c < seq.contact_joints; ++c) seq.contact.push_back(contacts[f][c]);

    const Vec2 img = traj.intrinsics.image_size;
    bool any_visible = false;
    for (int f = 0; f < frames; ++f) {
      JointPositions noisy = joints[f];
      add_joint_noise(noisy, options.sigma(), noise_rng);
      for (int k = 0; k < seq.keypoints; ++k) {
        const Projection p = project_point(noisy[kp_map[k]], traj.intrinsics, traj.frames[f]);
        const bool in_image = p.valid && p.pixel.x() >= 0 && p.pixel.x() <= img.x() &&
                              p.pixel.y() >= 0 && p.pixel.y() <= img.y();
        if (in_image) {
          seq.joint2d(f, k) = {p.pixel.x(), p.pixel.y()};
          seq.conf(f, k) = 1;
          any_visible = true;
        }
      }
    }
    if (!any_visible) {
      result.warnings.push_back(source_id + ": subject outside every frame of camera " +
                                std::to_string(cam) + ", sequence dropped");
      continue;
    }
    seq.canonical_gt = human_centric_labels(canon, traj, j_root);
    seq.validate();
    result.sequences.push_back(std::move(seq));
  }
  return result;
}

namespace {

struct JointGroup {
  std::vector<int> keypoint_ids;
  double rate = 0.0;
};

void mask_group(ProxySequence& seq, const JointGroup& group, const MaskOptions& opt,
                std::mt19937_64& rng) {
  const int frames = seq.frame_count();
  if (group.rate <= 0.0 || group.keypoint_ids.empty()) return;

  auto apply = [&](int lo, int hi) {
    for (int f = lo; f < std::min(hi, frames); ++f)
      for (int k : group.keypoint_ids) {
        seq.conf(f, k) = 0;
        seq.joint2d(f, k) = {0.0, 0.0};
      }
  };
  if (group.rate >= 1.0 - 1e-12) {
    apply(0, frames);
    return;
  }

  const double span_mean = 0.5 * (opt.span_min + opt.span_max);
  const double gap_mean = span_mean * (1.0 - group.rate) / group.rate;
  std::geometric_distribution<int> gap(1.0 / (1.0 + gap_mean));
  std::uniform_int_distribution<int> span(opt.span_min, opt.span_max);

  int pos = gap(rng);
  while (pos < frames) {
    const int len = span(rng);
    apply(pos, pos + len);
    pos += len + gap(rng);
  }
}

}  // namespace

ProxySequence mask_failures(const ProxySequence& proxy, const MaskOptions& options,
                            std::uint64_t rng_seed) {
  if (options.drop_rate < 0.0 || options.drop_rate > 1.0)
    throw std::invalid_argument("mask_failures: drop_rate outside [0,1]");
  ProxySequence out = proxy;
  if (options.drop_rate == 0.0) return out;

  // Keypoint groups by skeletal layout: body, left hand, right hand.
  JointGroup body, lhand, rhand;
  for (int k = 0; k < proxy.keypoints; ++k) {
    if (k < kBodyJoints) body.keypoint_ids.push_back(k);
    else if (k < kBodyJoints + kHandJoints) lhand.keypoint_ids.push_back(k);
    else rhand.keypoint_ids.push_back(k);
  }
  const double hand_rate = std::min(1.0, options.hand_boost * options.drop_rate);
  const double hand_n = static_cast<double>(lhand.keypoint_ids.size() + rhand.keypoint_ids.size());
  const double body_n = static_cast<double>(body.keypoint_ids.size());
  body.rate = body_n > 0
                  ? std::clamp((options.drop_rate * proxy.keypoints - hand_rate * hand_n) / body_n,
                               0.0, 1.0)
                  : 0.0;
  lhand.rate = rhand.rate = hand_rate;

  std::mt19937_64 rng(rng_seed);
  mask_group(out, body, options, rng);
  mask_group(out, lhand, options, rng);
  mask_group(out, rhand, options, rng);
  return out;
}

}  // namespace p2m
