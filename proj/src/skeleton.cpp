#include "mocap/skeleton.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "mocap/errors.hpp"

namespace mocap {

namespace {

constexpr double kDegenerateEps = 1e-8;
constexpr double kOrthonormalEps = 1e-5;

struct JointSpec {
  int parent;
  double x, y, z;
};

// Mean-proportioned 24-joint body, y-up, x towards the subject's left.
// Offsets are from the parent joint, in meters.
constexpr JointSpec kDefaultJoints[24] = {
    {-1, 0.00, 0.00, 0.00},   //  0 pelvis (root)
    {0, 0.09, -0.07, 0.00},   //  1 left hip
    {0, -0.09, -0.07, 0.00},  //  2 right hip
    {0, 0.00, 0.11, -0.01},   //  3 spine1
    {1, 0.02, -0.39, 0.00},   //  4 left knee
    {2, -0.02, -0.39, 0.00},  //  5 right knee
    {3, 0.00, 0.13, 0.00},    //  6 spine2
    {4, -0.01, -0.40, -0.03}, //  7 left ankle
    {5, 0.01, -0.40, -0.03},  //  8 right ankle
    {6, 0.00, 0.06, 0.01},    //  9 spine3
    {7, 0.02, -0.06, 0.12},   // 10 left foot
    {8, -0.02, -0.06, 0.12},  // 11 right foot
    {9, 0.00, 0.22, -0.02},   // 12 neck
    {9, 0.07, 0.12, -0.02},   // 13 left collar
    {9, -0.07, 0.12, -0.02},  // 14 right collar
    {12, 0.00, 0.12, 0.03},   // 15 head
    {13, 0.09, 0.04, -0.01},  // 16 left shoulder
    {14, -0.09, 0.04, -0.01}, // 17 right shoulder
    {16, 0.26, 0.00, 0.00},   // 18 left elbow
    {17, -0.26, 0.00, 0.00},  // 19 right elbow
    {18, 0.25, 0.00, 0.00},   // 20 left wrist
    {19, -0.25, 0.00, 0.00},  // 21 right wrist
    {20, 0.08, 0.00, 0.00},   // 22 left hand
    {21, -0.08, 0.00, 0.00},  // 23 right hand
};

}  // namespace

SkeletonModel SkeletonModel::default_body() {
  SkeletonModel s;
  s.joint_count = 24;
  s.root_index = 0;
  s.parent_index.resize(24);
  s.bone_offset.resize(24);
  for (int j = 0; j < 24; ++j) {
    s.parent_index[j] = kDefaultJoints[j].parent;
    s.bone_offset[j] = Vec3(kDefaultJoints[j].x, kDefaultJoints[j].y, kDefaultJoints[j].z);
  }
  // Sensor segments are identified by their proximal joint: the elbow joint
  // orients the forearm bone, the knee joint orients the lower leg.
  s.imu_site_joints = {18, 19, 4, 5, 15, 0};
  return s;
}

void SkeletonModel::validate() const {
  if (joint_count < 1) throw InvalidConfig("skeleton: joint_count must be >= 1");
  if (static_cast<int>(parent_index.size()) != joint_count ||
      static_cast<int>(bone_offset.size()) != joint_count)
    throw InvalidConfig("skeleton: parent/offset tables must have joint_count entries");
  if (root_index < 0 || root_index >= joint_count)
    throw InvalidConfig("skeleton: root_index out of range");
  if (parent_index[root_index] != -1)
    throw InvalidConfig("skeleton: root joint must have parent -1");
  for (int j = 0; j < joint_count; ++j) {
    if (j == root_index) continue;
    if (parent_index[j] < 0 || parent_index[j] >= j)
      throw InvalidConfig("skeleton: parent_index[" + std::to_string(j) +
                          "] must be a lower-numbered joint");
  }
  for (int site : imu_site_joints)
    if (site < 0 || site >= joint_count)
      throw InvalidConfig("skeleton: imu site joint out of range");
}

Mat3 rot6d_to_matrix(const Rot6d& r) {
  if (!r.allFinite()) throw DegenerateRotation("rot6d: non-finite input");
  const Vec3 a0 = r.head<3>();
  const Vec3 a1 = r.tail<3>();
  const double n0 = a0.norm();
  if (n0 < kDegenerateEps) throw DegenerateRotation("rot6d: first column is near zero");
  const Vec3 b0 = a0 / n0;
  const Vec3 v = a1 - b0.dot(a1) * b0;
  const double n1 = v.norm();
  if (n1 < kDegenerateEps)
    throw DegenerateRotation("rot6d: columns are parallel (degenerate second column)");
  const Vec3 b1 = v / n1;
  Mat3 R;
  R.col(0) = b0;
  R.col(1) = b1;
  R.col(2) = b0.cross(b1);
  return R;
}

Rot6d matrix_to_rot6d(const Mat3& R) {
  const Mat3 gram = R.transpose() * R - Mat3::Identity();
  if (gram.cwiseAbs().maxCoeff() > kOrthonormalEps)
    throw NotARotation("matrix_to_rot6d: input is not orthonormal within 1e-5");
  if (R.determinant() < 0.0)
    throw NotARotation("matrix_to_rot6d: input has negative determinant");
  Rot6d r;
  r.head<3>() = R.col(0);
  r.tail<3>() = R.col(1);
  return r;
}

FkResult forward_kinematics_full(const SkeletonModel& skeleton, const Mat& rotations6d) {
  const int joints = skeleton.joint_count;
  if (rotations6d.cols() != 6 * joints)
    throw ShapeMismatch("forward_kinematics: expected " + std::to_string(6 * joints) +
                        " rotation columns, got " + std::to_string(rotations6d.cols()));
  const int frames = static_cast<int>(rotations6d.rows());

  FkResult out;
  out.positions.setZero(frames, 3 * joints);
  out.global_rotations.resize(static_cast<std::size_t>(frames) * joints);

  for (int n = 0; n < frames; ++n) {
    for (int j = 0; j < joints; ++j) {
      Mat3 local;
      try {
        local = rot6d_to_matrix(rotations6d.block<1, 6>(n, 6 * j).transpose());
      } catch (const DegenerateRotation& e) {
        throw DegenerateRotation("frame " + std::to_string(n) + ", joint " +
                                 std::to_string(j) + ": " + e.what());
      }
      const std::size_t idx = static_cast<std::size_t>(n) * joints + j;
      if (j == skeleton.root_index) {
        out.global_rotations[idx] = local;
        // root stays at the origin
      } else {
        const int p = skeleton.parent_index[j];
        const std::size_t pidx = static_cast<std::size_t>(n) * joints + p;
        out.global_rotations[idx] = out.global_rotations[pidx] * local;
        const Vec3 pos = out.positions.block<1, 3>(n, 3 * p).transpose() +
                         out.global_rotations[pidx] * skeleton.bone_offset[j];
        out.positions.block<1, 3>(n, 3 * j) = pos.transpose();
      }
    }
  }
  return out;
}

Mat forward_kinematics(const SkeletonModel& skeleton, const Mat& rotations6d) {
  return forward_kinematics_full(skeleton, rotations6d).positions;
}

}  // namespace mocap
