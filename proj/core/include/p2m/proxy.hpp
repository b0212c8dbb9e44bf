#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "p2m/camera.hpp"
#include "p2m/contact.hpp"
#include "p2m/coords.hpp"
#include "p2m/skeleton.hpp"

namespace p2m {

/// Derives independent stream seeds from a master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Observation side of a proxy-to-motion pair: projected 2D keypoints
/// with a detection mask, per-joint contact labels, the observing camera
/// and the per-frame human-centric training labels.
struct ProxySequence {
  std::string source_id;
  double fps = 60.0;
  int keypoints = 0;       // K
  int contact_joints = 0;  // C

  std::vector<std::array<double, 2>> joints2d;  // F*K, row-major, pixels
  std::vector<std::uint8_t> confidence;         // F*K, {0,1}
  std::vector<double> contact;                  // F*C, [0,1]

  CameraTrajectory camera;
  LabeledStates canonical_gt;

  int frame_count() const {
    return keypoints == 0 ? 0 : static_cast<int>(joints2d.size()) / keypoints;
  }
  std::array<double, 2>& joint2d(int f, int k) { return joints2d[f * keypoints + k]; }
  const std::array<double, 2>& joint2d(int f, int k) const { return joints2d[f * keypoints + k]; }
  std::uint8_t& conf(int f, int k) { return confidence[f * keypoints + k]; }
  std::uint8_t conf(int f, int k) const { return confidence[f * keypoints + k]; }
  double contact_label(int f, int c) const { return contact[f * contact_joints + c]; }

  void validate() const;
};

/// Slerp on per-joint quaternions, linear translation. Exact-phase
/// samples copy source frames bit for bit.
MotionSequence resample_motion(const MotionSequence& motion, double target_fps);

/// Samples a full-body pose track at time `seconds` (slerp between the
/// surrounding frames; ends are held).
FullBodyPose sample_pose(const MotionSequence& motion, double seconds);

/// Replaces the hand channels of a 60 fps body motion with a 30 fps hand
/// clip upsampled by Slerp to a randomly chosen fps in {40, 50, 60} and
/// laid onto the body timeline at a random offset.
MotionSequence integrate_hands(const MotionSequence& body_motion, const MotionSequence& hand_clip,
                               std::uint64_t rng_seed);

struct SynthesisOptions {
  int num_cameras = 4;
  double noise_std = 0.01;       // meters; see noise_is_variance
  bool noise_is_variance = false;  // true reads the 0.01 as variance (sigma = 0.1 m)
  ContactParams contact;
  TrajectoryRanges camera_ranges;
  std::vector<int> keypoint_map;  // output keypoint -> skeleton joint; empty = identity
  std::uint64_t seed = 0;

  double sigma() const { return noise_is_variance ? std::sqrt(noise_std) : noise_std; }
};

/// Adds i.i.d. zero-mean Gaussian noise per coordinate (exposed for the
/// noise-statistics checks).
void add_joint_noise(JointPositions& joints, double sigma, std::mt19937_64& rng);

struct SynthesisResult {
  std::vector<ProxySequence> sequences;
  std::vector<std::string> warnings;
};

/// Canonicalizes the motion, then renders it under `num_cameras` sampled
/// trajectories: noisy 3D joints projected to 2D, detection mask from
/// visibility, camera-independent contact labels, human-centric labels.
/// Sequences whose subject is outside every frame are dropped with a
/// warning.
SynthesisResult synthesize_proxy(const ParametricSkeleton& skel, const MotionSequence& motion,
                                 const SynthesisOptions& options,
                                 const std::string& source_id = "motion");

struct MaskOptions {
  double drop_rate = 0.5;     // overall fraction of frame x joint entries masked
  double hand_boost = 1.25;   // hands fail more often than the body
  int span_min = 3;
  int span_max = 15;
};

/// Simulates detector failures: contiguous spans of frames are masked
/// per joint group (body, each hand), confidence zeroed and joints
/// zeroed. Overall masked fraction tracks drop_rate.
ProxySequence mask_failures(const ProxySequence& proxy, const MaskOptions& options,
                            std::uint64_t rng_seed);

}  // namespace p2m
