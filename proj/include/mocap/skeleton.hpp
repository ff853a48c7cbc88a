#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

namespace mocap {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// 6D rotation: the first two columns of a rotation matrix, stacked
/// column-wise as [c0x c0y c0z c1x c1y c1z].
using Rot6d = Eigen::Matrix<double, 6, 1>;

constexpr int kImuCount = 6;

/// Fixed-topology articulated body. Joints are stored in topological order
/// (parent_index[j] < j for every non-root joint), the root has parent -1.
struct SkeletonModel {
  int joint_count = 0;
  int root_index = 0;
  std::vector<int> parent_index;
  std::vector<Vec3> bone_offset;  // offset from parent, in the parent's rest frame (m)
  /// Joint carrying each sensor, in the fixed order:
  /// left forearm, right forearm, left lower leg, right lower leg, head, pelvis.
  std::array<int, kImuCount> imu_site_joints{};

  /// 24-joint body with mean-proportioned bone lengths. All synthetic data
  /// in this project is generated and evaluated against this one tree.
  static SkeletonModel default_body();

  /// Throws InvalidConfig if the tree structure or sensor sites are invalid.
  void validate() const;
};

/// A motion clip: per-frame joint rotations (6D) and, optionally, the
/// root-relative joint positions they imply (root pinned at the origin).
struct MotionSequence {
  int joints = 0;
  double fps = 60.0;
  Mat rotations;  // N x 6J
  Mat positions;  // N x 3J, or 0x0 until filled by forward kinematics

  int frames() const { return static_cast<int>(rotations.rows()); }
  bool has_positions() const { return positions.size() > 0; }

  Eigen::Block<Mat, 1, 6> rot6d(int frame, int joint) {
    return rotations.block<1, 6>(frame, 6 * joint);
  }
  Vec3 position(int frame, int joint) const {
    return positions.block<1, 3>(frame, 3 * joint).transpose();
  }
};

/// Gram-Schmidt recovery of a full rotation from its 6D representation.
/// Throws DegenerateRotation on near-zero or near-parallel input columns.
Mat3 rot6d_to_matrix(const Rot6d& r);

/// Drops the third column. Throws NotARotation if R is not orthonormal
/// within 1e-5 or has negative determinant.
Rot6d matrix_to_rot6d(const Mat3& R);

inline Rot6d rot6d_identity() {
  Rot6d r;
  r << 1, 0, 0, 0, 1, 0;
  return r;
}

struct FkResult {
  Mat positions;                        // N x 3J, root-relative
  std::vector<Mat3> global_rotations;   // N*J entries, index n*J + j
  const Mat3& rotation(int frame, int joint, int joints) const {
    return global_rotations[static_cast<std::size_t>(frame) * joints + joint];
  }
};

/// Forward kinematics over all frames. The root is pinned at the origin;
/// child position = parent position + parent global rotation * bone offset.
/// DegenerateRotation errors are rethrown with the frame/joint index.
FkResult forward_kinematics_full(const SkeletonModel& skeleton, const Mat& rotations6d);

/// Positions only.
Mat forward_kinematics(const SkeletonModel& skeleton, const Mat& rotations6d);

}  // namespace mocap
