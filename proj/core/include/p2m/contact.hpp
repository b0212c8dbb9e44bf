#pragma once

#include <vector>

#include "p2m/skeleton.hpp"

namespace p2m {

struct ContactParams {
  double v_max = 0.2;   // m/s
  double z_max = 0.08;  // m
  double k_v = 0.04;    // m/s
  double k_z = 0.008;   // m

  void validate() const;
};

double sigmoid(double x);

/// Continuous contact indicator in (0, 1):
///   Sigmoid((v_max - v) / k_v) * Sigmoid((z_max - z) / k_z)
double contact_indicator(double velocity, double height, const ContactParams& params);

/// F x C contact labels for the skeleton's contact joints. Velocity is
/// the 3D finite-difference speed (central in the interior, one-sided at
/// the ends, zero for single-frame sequences); height is the joint's y.
std::vector<std::vector<double>> label_contacts(const ParametricSkeleton& skel,
                                                const MotionSequence& motion,
                                                const ContactParams& params = ContactParams{});

/// Hard indicator used where a binary label is needed (threshold 0.5).
inline bool contact_binary(double label) { return label >= 0.5; }

}  // namespace p2m
