#include <doctest.h>

#include <Eigen/Geometry>

#include "mocap/errors.hpp"
#include "mocap/skeleton.hpp"
#include "oracles.hpp"

using namespace mocap;

namespace {

Rot6d make6(double a, double b, double c, double d, double e, double f) {
  Rot6d r;
  r << a, b, c, d, e, f;
  return r;
}

SkeletonModel two_bone_chain() {
  SkeletonModel s;
  s.joint_count = 2;
  s.root_index = 0;
  s.parent_index = {-1, 0};
  s.bone_offset = {Vec3::Zero(), Vec3(0, 1, 0)};
  s.imu_site_joints = {0, 0, 0, 0, 0, 0};
  return s;
}

Mat identity_rotations(int frames, int joints) {
  Mat rot(frames, 6 * joints);
  for (int n = 0; n < frames; ++n)
    for (int j = 0; j < joints; ++j) rot.block<1, 6>(n, 6 * j) = rot6d_identity().transpose();
  return rot;
}

}  // namespace

TEST_CASE("rot6d_to_matrix: identity and normalization invariance") {
  CHECK(rot6d_to_matrix(make6(1, 0, 0, 0, 1, 0)).isApprox(Mat3::Identity(), 1e-15));
  CHECK(rot6d_to_matrix(make6(2, 0, 0, 0, 3, 0)).isApprox(Mat3::Identity(), 1e-15));
}

TEST_CASE("rot6d_to_matrix: Gram-Schmidt removes the first-column component") {
  // Second input column (1,1,0) loses its e1 part, leaving columns e1,e2,e3.
  const Mat3 R = rot6d_to_matrix(make6(1, 0, 0, 1, 1, 0));
  CHECK(R.isApprox(Mat3::Identity(), 1e-14));
}

TEST_CASE("rot6d_to_matrix: output is a proper rotation for arbitrary input") {
  RandomStream rng(7);
  for (int i = 0; i < 200; ++i) {
    Rot6d r;
    for (int k = 0; k < 6; ++k) r(k) = rng.uniform(-2.0, 2.0);
    if (r.head<3>().norm() < 1e-3) continue;
    Mat3 R;
    try {
      R = rot6d_to_matrix(r);
    } catch (const DegenerateRotation&) {
      continue;
    }
    CHECK((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(R.determinant() == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("rot6d_to_matrix: degenerate inputs raise") {
  CHECK_THROWS_AS(rot6d_to_matrix(make6(0, 0, 0, 0, 1, 0)), DegenerateRotation);
  CHECK_THROWS_AS(rot6d_to_matrix(make6(1, 0, 0, 2, 0, 0)), DegenerateRotation);
  Rot6d nan6 = make6(1, 0, 0, 0, 1, 0);
  nan6(3) = std::nan("");
  CHECK_THROWS_AS(rot6d_to_matrix(nan6), DegenerateRotation);
}

TEST_CASE("matrix_to_rot6d: definition and round trip") {
  CHECK((matrix_to_rot6d(Mat3::Identity()) - rot6d_identity()).norm() == 0.0);

  const Mat3 yaw90 = Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()).toRotationMatrix();
  const Rot6d r = matrix_to_rot6d(yaw90);
  CHECK(r.head<3>().isApprox(yaw90.col(0)));
  CHECK(r.tail<3>().isApprox(yaw90.col(1)));

  RandomStream rng(11);
  for (int i = 0; i < 100; ++i) {
    const Mat3 R = testing::random_rotation(rng);
    const Mat3 back = rot6d_to_matrix(matrix_to_rot6d(R));
    CHECK((back - R).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("matrix_to_rot6d: rejects non-rotations") {
  Mat3 skew = Mat3::Identity();
  skew(0, 1) = 0.01;
  CHECK_THROWS_AS(matrix_to_rot6d(skew), NotARotation);
  Mat3 mirror = Mat3::Identity();
  mirror(2, 2) = -1.0;
  CHECK_THROWS_AS(matrix_to_rot6d(mirror), NotARotation);
}

TEST_CASE("forward_kinematics: rest pose equals cumulative offsets") {
  const SkeletonModel body = SkeletonModel::default_body();
  body.validate();
  const Mat pos = forward_kinematics(body, identity_rotations(2, body.joint_count));

  for (int j = 0; j < body.joint_count; ++j) {
    Vec3 expect = Vec3::Zero();
    int at = j;
    while (at != body.root_index) {
      expect += body.bone_offset[at];
      at = body.parent_index[at];
    }
    CHECK((pos.block<1, 3>(0, 3 * j).transpose() - expect).norm() < 1e-12);
    CHECK((pos.block<1, 3>(1, 3 * j).transpose() - expect).norm() < 1e-12);
  }
}

TEST_CASE("forward_kinematics: two-bone chain, 90 degree root yaw") {
  const SkeletonModel chain = two_bone_chain();
  Mat rot = identity_rotations(1, 2);
  const Mat3 yaw90 = Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()).toRotationMatrix();
  rot.block<1, 6>(0, 0) = matrix_to_rot6d(yaw90).transpose();

  const Mat pos = forward_kinematics(chain, rot);
  CHECK(pos.block<1, 3>(0, 0).norm() == 0.0);  // root pinned
  CHECK((pos.block<1, 3>(0, 3).transpose() - Vec3(-1, 0, 0)).norm() < 1e-12);
}

TEST_CASE("forward_kinematics: rotating a leaf moves nothing else") {
  const SkeletonModel body = SkeletonModel::default_body();
  RandomStream rng(3);
  Mat rot = testing::random_rotation_sequence(rng, 1, body.joint_count);
  const Mat base = forward_kinematics(body, rot);

  const int leaf = 23;  // right hand: no children
  rot.block<1, 6>(0, 6 * leaf) = testing::random_rot6d(rng).transpose();
  const Mat moved = forward_kinematics(body, rot);
  CHECK((moved - base).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward_kinematics: global-rotation equivariance") {
  const SkeletonModel body = SkeletonModel::default_body();
  RandomStream rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat rot = testing::random_rotation_sequence(rng, 3, body.joint_count);
    const Mat base = forward_kinematics(body, rot);

    const Mat3 g = testing::random_rotation(rng);
    Mat rotated = rot;
    for (int n = 0; n < 3; ++n) {
      const Mat3 root = rot6d_to_matrix(rot.block<1, 6>(n, 0).transpose());
      rotated.block<1, 6>(n, 0) = matrix_to_rot6d(g * root).transpose();
    }
    const Mat moved = forward_kinematics(body, rotated);
    for (int n = 0; n < 3; ++n)
      for (int j = 0; j < body.joint_count; ++j) {
        const Vec3 expect = g * base.block<1, 3>(n, 3 * j).transpose();
        CHECK((moved.block<1, 3>(n, 3 * j).transpose() - expect).norm() < 1e-6);
      }
  }
}

TEST_CASE("forward_kinematics: frames are independent") {
  const SkeletonModel body = SkeletonModel::default_body();
  RandomStream rng(9);
  const Mat rot = testing::random_rotation_sequence(rng, 4, body.joint_count);
  const Mat all = forward_kinematics(body, rot);

  // Permute the other frames; frame 2 must come out bit-identical.
  Mat shuffled(4, rot.cols());
  shuffled.row(0) = rot.row(3);
  shuffled.row(1) = rot.row(0);
  shuffled.row(2) = rot.row(2);
  shuffled.row(3) = rot.row(1);
  const Mat out = forward_kinematics(body, shuffled);
  CHECK((out.row(2) - all.row(2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward_kinematics: degenerate rotation reports frame and joint") {
  const SkeletonModel chain = two_bone_chain();
  Mat rot = identity_rotations(2, 2);
  rot.block<1, 6>(1, 6).setZero();
  try {
    forward_kinematics(chain, rot);
    FAIL("expected DegenerateRotation");
  } catch (const DegenerateRotation& e) {
    const std::string msg = e.what();
    CHECK(msg.find("frame 1") != std::string::npos);
    CHECK(msg.find("joint 1") != std::string::npos);
  }
}

TEST_CASE("default body: valid tree with the documented sensor order") {
  const SkeletonModel body = SkeletonModel::default_body();
  body.validate();
  CHECK(body.joint_count == 24);
  // left forearm, right forearm, left lower leg, right lower leg, head, pelvis
  CHECK(body.imu_site_joints == std::array<int, 6>{18, 19, 4, 5, 15, 0});
  for (int j = 1; j < body.joint_count; ++j) CHECK(body.parent_index[j] < j);
}
