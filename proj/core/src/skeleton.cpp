#include "p2m/skeleton.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace p2m {

int ParametricSkeleton::joint_index(const std::string& name) const {
  for (int i = 0; i < joint_count(); ++i)
    if (joint_names[i] == name) return i;
  throw std::invalid_argument("unknown joint name: " + name);
}

void ParametricSkeleton::validate() const {
  const int n = joint_count();
  if (n == 0) throw DimensionError("parent", "empty skeleton");
  if (parent[0] != -1) throw DimensionError("parent", "joint 0 must be the root");
  for (int i = 1; i < n; ++i) {
    if (parent[i] < 0 || parent[i] >= i)
      throw DimensionError("parent", "parent[" + std::to_string(i) + "] must be < " + std::to_string(i));
  }
  if (static_cast<int>(rest_offset.size()) != n) throw DimensionError("rest_offset", "count != joint_count");
  if (static_cast<int>(shape_basis.size()) != n) throw DimensionError("shape_basis", "count != joint_count");
  if (static_cast<int>(joint_names.size()) != n) throw DimensionError("joint_names", "count != joint_count");
  for (int id : contact_joint_ids)
    if (id < 0 || id >= n) throw DimensionError("contact_joint_ids", "index out of range");
}

bool FullBodyPose::finite() const {
  if (!beta.allFinite() || !t.allFinite()) return false;
  for (const auto& v : theta)
    if (!v.allFinite()) return false;
  for (const auto& v : g)
    if (!v.allFinite()) return false;
  return true;
}

Vec3 local_rotation(const FullBodyPose& pose, int joint) {
  if (joint < kBodyJoints) return pose.theta[joint];
  return pose.g[joint - kBodyJoints];
}

JointPositions forward_kinematics(const ParametricSkeleton& skel, const FullBodyPose& pose) {
  const int n = skel.joint_count();
  const int rotated = static_cast<int>(pose.theta.size() + pose.g.size());
  if (rotated != n)
    throw DimensionError("theta/g", "pose provides " + std::to_string(rotated) +
                                        " rotations for " + std::to_string(n) + " joints");
  if (!pose.finite()) throw DimensionError("pose", "non-finite entries");

  std::vector<Mat3> global_rot(n);
  JointPositions pos(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 rest = skel.rest_offset[i] + skel.shape_basis[i] * pose.beta;
    const Mat3 local = rodrigues(local_rotation(pose, i));
    if (i == 0) {
      global_rot[0] = local;
      pos[0] = rest + pose.t;
    } else {
      const int p = skel.parent[i];
      pos[i] = pos[p] + global_rot[p] * rest;
      global_rot[i] = global_rot[p] * local;
    }
  }
  return pos;
}

namespace {

struct ToyJoint {
  const char* name;
  const char* parent;
  double x, y, z;
};

// Body layout: y-up, meters; pelvis near 0.93 m. Proportions follow a
// 1.7 m figure.
constexpr ToyJoint kToyBody[kBodyJoints] = {
    {"pelvis", "-", 0.0, 0.93, 0.0},
    {"left_hip", "pelvis", 0.09, -0.06, 0.0},
    {"right_hip", "pelvis", -0.09, -0.06, 0.0},
    {"spine1", "pelvis", 0.0, 0.11, 0.0},
    {"left_knee", "left_hip", 0.0, -0.40, 0.0},
    {"right_knee", "right_hip", 0.0, -0.40, 0.0},
    {"spine2", "spine1", 0.0, 0.12, 0.0},
    {"left_ankle", "left_knee", 0.0, -0.41, 0.0},
    {"right_ankle", "right_knee", 0.0, -0.41, 0.0},
    {"spine3", "spine2", 0.0, 0.12, 0.0},
    {"left_foot", "left_ankle", 0.0, -0.05, 0.14},
    {"right_foot", "right_ankle", 0.0, -0.05, 0.14},
    {"neck", "spine3", 0.0, 0.12, 0.0},
    {"left_collar", "spine3", 0.06, 0.08, 0.0},
    {"right_collar", "spine3", -0.06, 0.08, 0.0},
    {"head", "neck", 0.0, 0.14, 0.0},
    {"left_shoulder", "left_collar", 0.11, 0.0, 0.0},
    {"right_shoulder", "right_collar", -0.11, 0.0, 0.0},
    {"left_elbow", "left_shoulder", 0.27, 0.0, 0.0},
    {"right_elbow", "right_shoulder", -0.27, 0.0, 0.0},
    {"left_wrist", "left_elbow", 0.25, 0.0, 0.0},
    {"right_wrist", "right_elbow", -0.25, 0.0, 0.0},
};

constexpr const char* kFingers[5] = {"index", "middle", "pinky", "ring", "thumb"};

}  // namespace

ParametricSkeleton toy_skeleton() {
  ParametricSkeleton s;
  auto add = [&s](const std::string& name, const std::string& parent, const Vec3& off) {
    s.joint_names.push_back(name);
    s.parent.push_back(parent == "-" ? -1 : s.joint_index(parent));
    s.rest_offset.push_back(off);
  };
  for (const auto& j : kToyBody) add(j.name, j.parent, Vec3(j.x, j.y, j.z));
  for (int side = 0; side < 2; ++side) {
    const std::string prefix = side == 0 ? "left_" : "right_";
    const double sx = side == 0 ? 1.0 : -1.0;
    for (int f = 0; f < 5; ++f) {
      // Fan the fingers slightly in z; thumb angles inward.
      const double z = (f == 4) ? 0.03 : 0.015 * (1 - f);
      for (int k = 0; k < 3; ++k) {
        const std::string parent =
            k == 0 ? prefix + "wrist" : prefix + std::string(kFingers[f]) + std::to_string(k);
        const double len = (k == 0) ? 0.09 : 0.03;
        add(prefix + kFingers[f] + std::to_string(k + 1), parent,
            Vec3(sx * len, 0.0, k == 0 ? z : 0.0));
      }
    }
  }

  s.shape_basis.resize(s.parent.size());
  for (size_t i = 0; i < s.parent.size(); ++i) {
    auto& B = s.shape_basis[i];
    B.setZero();
    // Component 0 scales limb lengths, component 1 adds overall height.
    B.col(0) = 0.05 * s.rest_offset[i];
    if (i == 0) B.col(1) = Vec3(0.0, 0.05, 0.0);
  }
  for (const char* name : {"left_ankle", "right_ankle", "left_foot", "right_foot"})
    s.contact_joint_ids.push_back(s.joint_index(name));
  s.validate();
  return s;
}

namespace {

std::string serialize_skeleton(const ParametricSkeleton& s) {
  std::ostringstream out;
  out.precision(17);
  out << "p2m-skeleton v1\n";
  out << "joints " << s.joint_count() << "\n";
  for (int i = 0; i < s.joint_count(); ++i) {
    out << "joint " << s.joint_names[i] << " "
        << (s.parent[i] < 0 ? std::string("-") : s.joint_names[s.parent[i]]) << " "
        << s.rest_offset[i].x() << " " << s.rest_offset[i].y() << " " << s.rest_offset[i].z()
        << "\n";
  }
  for (int i = 0; i < s.joint_count(); ++i) {
    for (int r = 0; r < 3; ++r) {
      out << "shape_basis " << s.joint_names[i] << " " << r;
      for (int c = 0; c < kShapeDims; ++c) out << " " << s.shape_basis[i](r, c);
      out << "\n";
    }
  }
  out << "contact";
  for (int id : s.contact_joint_ids) out << " " << s.joint_names[id];
  out << "\n";
  return out.str();
}

}  // namespace

void save_skeleton(const ParametricSkeleton& skel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write skeleton file: " + path);
  out << serialize_skeleton(skel);
}

ParametricSkeleton load_skeleton(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read skeleton file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "p2m-skeleton v1")
    throw std::runtime_error("bad skeleton header in " + path);

  ParametricSkeleton s;
  int joints = -1;
  std::vector<std::string> contact_names;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "joints") {
      ls >> joints;
    } else if (key == "joint") {
      std::string name, parent;
      Vec3 off;
      ls >> name >> parent >> off.x() >> off.y() >> off.z();
      s.joint_names.push_back(name);
      s.parent.push_back(parent == "-" ? -1 : s.joint_index(parent));
      s.rest_offset.push_back(off);
      s.shape_basis.emplace_back(Eigen::Matrix<double, 3, kShapeDims>::Zero());
    } else if (key == "shape_basis") {
      std::string name;
      int row;
      ls >> name >> row;
      const int idx = s.joint_index(name);
      for (int c = 0; c < kShapeDims; ++c) ls >> s.shape_basis[idx](row, c);
    } else if (key == "contact") {
      std::string name;
      while (ls >> name) contact_names.push_back(name);
    } else {
      throw std::runtime_error("unknown skeleton key '" + key + "' in " + path);
    }
    if (ls.fail() && key != "contact")
      throw std::runtime_error("malformed skeleton line: " + line);
  }
  if (joints != s.joint_count())
    throw std::runtime_error("skeleton joint count mismatch in " + path);
  for (const auto& n : contact_names) s.contact_joint_ids.push_back(s.joint_index(n));
  s.validate();
  return s;
}

std::uint64_t skeleton_hash(const ParametricSkeleton& skel) {
  const std::string text = serialize_skeleton(skel);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace p2m
