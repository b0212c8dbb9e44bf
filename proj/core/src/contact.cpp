#include "p2m/contact.hpp"

#include <cmath>
#include <stdexcept>

namespace p2m {

void ContactParams::validate() const {
  if (v_max <= 0 || z_max <= 0 || k_v <= 0 || k_z <= 0)
    throw std::invalid_argument("ContactParams: all fields must be strictly positive");
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double contact_indicator(double velocity, double height, const ContactParams& params) {
  params.validate();
  return sigmoid((params.v_max - velocity) / params.k_v) *
         sigmoid((params.z_max - height) / params.k_z);
}

std::vector<std::vector<double>> label_contacts(const ParametricSkeleton& skel,
                                                const MotionSequence& motion,
                                                const ContactParams& params) {
  params.validate();
  if (motion.fps <= 0) throw std::invalid_argument("label_contacts: fps must be positive");
  const int frames = motion.frame_count();
  const int joints = static_cast<int>(skel.contact_joint_ids.size());

  std::vector<JointPositions> pos(frames);
  for (int f = 0; f < frames; ++f) pos[f] = forward_kinematics(skel, motion.frames[f]);

  std::vector<std::vector<double>> labels(frames, std::vector<double>(joints, 0.0));
  for (int c = 0; c < joints; ++c) {
    const int j = skel.contact_joint_ids[c];
    for (int f = 0; f < frames; ++f) {
      double v = 0.0;  // single-frame sequences have no velocity estimate
      if (frames > 1) {
        if (f == 0) {
          v = (pos[1][j] - pos[0][j]).norm() * motion.fps;
        } else if (f == frames - 1) {
          v = (pos[f][j] - pos[f - 1][j]).norm() * motion.fps;
        } else {
          v = (pos[f + 1][j] - pos[f - 1][j]).norm() * motion.fps * 0.5;
        }
      }
      labels[f][c] = contact_indicator(v, pos[f][j].y(), params);
    }
  }
  return labels;
}

}  // namespace p2m
