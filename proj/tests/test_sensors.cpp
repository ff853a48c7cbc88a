#include <doctest.h>

#include <cmath>

#include "mocap/errors.hpp"
#include "mocap/sensors.hpp"
#include "oracles.hpp"

using namespace mocap;

namespace {

SkeletonModel one_joint_body() {
  SkeletonModel s;
  s.joint_count = 1;
  s.root_index = 0;
  s.parent_index = {-1};
  s.bone_offset = {Vec3::Zero()};
  s.imu_site_joints = {0, 0, 0, 0, 0, 0};
  return s;
}

MotionSequence static_motion(const SkeletonModel& body, int frames, RandomStream& rng) {
  MotionSequence m;
  m.joints = body.joint_count;
  m.fps = 60.0;
  const Mat frame = testing::random_rotation_sequence(rng, 1, body.joint_count);
  m.rotations = frame.replicate(frames, 1);
  m.positions = forward_kinematics(body, m.rotations);
  return m;
}

KeypointMap single_point_map() {
  KeypointMap map;
  map.keypoint_to_joint = {0};
  map.root_keypoint = 0;
  return map;
}

}  // namespace

TEST_CASE("synthesize_imu: static pose gives zero acceleration") {
  const SkeletonModel body = SkeletonModel::default_body();
  RandomStream rng(21);
  const MotionSequence motion = static_motion(body, 8, rng);
  const ImuSequence imu = synthesize_imu(body, motion);
  for (int n = 0; n < 8; ++n)
    for (int s = 0; s < kImuCount; ++s) CHECK(imu.acceleration(n, s).norm() == 0.0);
}

TEST_CASE("synthesize_imu: rest pose has identity orientations") {
  const SkeletonModel body = SkeletonModel::default_body();
  MotionSequence motion;
  motion.joints = body.joint_count;
  motion.fps = 60.0;
  motion.rotations = Mat(3, 6 * body.joint_count);
  for (int n = 0; n < 3; ++n)
    for (int j = 0; j < body.joint_count; ++j)
      motion.rotations.block<1, 6>(n, 6 * j) = rot6d_identity().transpose();
  const ImuSequence imu = synthesize_imu(body, motion);
  for (int s = 0; s < kImuCount; ++s)
    CHECK((imu.orientation(1, s) - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("synthesize_imu: orientations are the FK global rotations, bitwise") {
  const SkeletonModel body = SkeletonModel::default_body();
  RandomStream rng(22);
  MotionSequence motion;
  motion.joints = body.joint_count;
  motion.fps = 60.0;
  motion.rotations = testing::random_rotation_sequence(rng, 5, body.joint_count);

  const ImuSequence imu = synthesize_imu(body, motion);
  const FkResult fk = forward_kinematics_full(body, motion.rotations);
  for (int n = 0; n < 5; ++n)
    for (int s = 0; s < kImuCount; ++s) {
      const Mat3 want = fk.rotation(n, body.imu_site_joints[s], body.joint_count);
      CHECK((imu.orientation(n, s) - want).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("synthesize_imu: rejects too-short sequences") {
  const SkeletonModel body = SkeletonModel::default_body();
  RandomStream rng(23);
  const MotionSequence motion = static_motion(body, 2, rng);
  CHECK_THROWS_AS(synthesize_imu(body, motion), TooShortSequence);
}

TEST_CASE("central_acceleration: exact for quadratic trajectories") {
  const double fps = 60.0;
  const double a = 3.7;  // m/s^2 along x
  const int n = 20;
  Mat pos(n, 3);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fps;
    pos.row(i) << 0.5 * a * t * t, 0.0, 0.0;
  }
  const Mat acc = central_acceleration(pos, fps);
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(acc(i, 0) - a) < 1e-6);
    CHECK(acc(i, 1) == 0.0);
    CHECK(acc(i, 2) == 0.0);
  }
  // Boundary rows copy their interior neighbors.
  CHECK(acc.row(0) == acc.row(1));
  CHECK(acc.row(n - 1) == acc.row(n - 2));
}

TEST_CASE("project_keypoints: principal point, behind-camera, hand case") {
  const SkeletonModel body = one_joint_body();
  const KeypointMap map = single_point_map();
  CameraIntrinsics intr;  // fx=fy=500, cx=320, cy=240, 640x480

  MotionSequence motion;
  motion.joints = 1;
  motion.fps = 60.0;
  motion.rotations = Mat(3, 6);
  for (int i = 0; i < 3; ++i) motion.rotations.block<1, 6>(i, 0) = rot6d_identity().transpose();
  motion.positions = Mat::Zero(3, 3);

  Mat root_translation(3, 3);
  root_translation.row(0) << 0.0, 0.0, 2.5;   // on the optical axis
  root_translation.row(1) << 0.0, 0.0, -1.0;  // behind the camera
  root_translation.row(2) << 1.0, 0.0, 2.0;   // the pinhole hand case

  const RawKeypointSequence raw =
      project_keypoints(body, motion, map, intr, CameraPose{}, root_translation);

  CHECK(raw.data(0, 0) == doctest::Approx(320.0));
  CHECK(raw.data(0, 1) == doctest::Approx(240.0));
  CHECK(raw.data(0, 2) == 1.0);

  CHECK(raw.data(1, 0) == 0.0);
  CHECK(raw.data(1, 1) == 0.0);
  CHECK(raw.data(1, 2) == 0.0);

  CHECK(raw.data(2, 0) == doctest::Approx(570.0));  // 500 * 1/2 + 320
  CHECK(raw.data(2, 2) == 1.0);
}

TEST_CASE("preprocess_keypoints: plane conversion and root normalization") {
  CameraIntrinsics intr;
  KeypointMap map;
  map.keypoint_to_joint = {0, 0};  // second keypoint coincides with the root
  map.root_keypoint = 0;

  RawKeypointSequence raw;
  raw.keypoint_count = 2;
  raw.data = Mat(2, 6);
  // frame 0: root at the principal point, duplicate on top of it
  raw.data.row(0) << 320.0, 240.0, 1.0, 320.0, 240.0, 1.0;
  // frame 1: root at u=570 (plane x=0.5), duplicate occluded
  raw.data.row(1) << 570.0, 240.0, 1.0, 0.0, 0.0, 0.0;

  const KeypointSequence k = preprocess_keypoints(raw, map, intr);
  CHECK(k.x(0, 0) == 0.0);
  CHECK(k.y(0, 0) == 0.0);
  CHECK(k.x(0, 1) == 0.0);  // coincident keypoint is root-relative zero
  CHECK(k.y(0, 1) == 0.0);

  CHECK(k.x(1, 0) == doctest::Approx(0.5));  // root stays absolute
  CHECK(k.x(1, 1) == 0.0);                   // sentinel untouched
  CHECK(k.confidence(1, 1) == 0.0);
}

TEST_CASE("preprocess(project(.)) is intrinsics-invariant") {
  const SkeletonModel body = SkeletonModel::default_body();
  const KeypointMap map = KeypointMap::default_map();
  RandomStream rng(31);

  MotionSequence motion;
  motion.joints = body.joint_count;
  motion.fps = 60.0;
  motion.rotations = testing::random_rotation_sequence(rng, 4, body.joint_count);
  motion.positions = forward_kinematics(body, motion.rotations);

  Mat root_translation(4, 3);
  for (int n = 0; n < 4; ++n) root_translation.row(n) << 0.0, 0.0, 5.0;

  CameraIntrinsics a;
  CameraIntrinsics b{800.0, 820.0, 400.0, 300.0, 800.0, 600.0};

  const KeypointSequence ka =
      preprocess_keypoints(project_keypoints(body, motion, map, a, CameraPose{}, root_translation),
                           map, a);
  const KeypointSequence kb =
      preprocess_keypoints(project_keypoints(body, motion, map, b, CameraPose{}, root_translation),
                           map, b);
  CHECK((ka.data - kb.data).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("degrade_keypoints: identity spec is bit-identical") {
  RandomStream rng(41);
  KeypointSequence k;
  k.keypoint_count = 5;
  k.data = Mat(6, 15);
  for (Eigen::Index r = 0; r < 6; ++r)
    for (Eigen::Index c = 0; c < 15; ++c) k.data(r, c) = rng.uniform(-1.0, 1.0);

  DegradationSpec spec;
  spec.rng_seed = 99;
  const KeypointSequence out = degrade_keypoints(k, spec);
  CHECK((out.data - k.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degrade_keypoints: occlusion interval blanks every keypoint") {
  KeypointSequence k;
  k.keypoint_count = 3;
  k.data = Mat::Ones(5, 9);

  DegradationSpec spec;
  spec.occluded_frame_intervals = {{0, 5}};
  const KeypointSequence out = degrade_keypoints(k, spec);
  CHECK(out.data.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degrade_keypoints: deterministic, confidence preserved under noise") {
  RandomStream rng(43);
  KeypointSequence k;
  k.keypoint_count = 4;
  k.data = Mat::Zero(10, 12);
  for (int n = 0; n < 10; ++n)
    for (int i = 0; i < 4; ++i) {
      k.data(n, 3 * i) = rng.uniform(-0.5, 0.5);
      k.data(n, 3 * i + 1) = rng.uniform(-0.5, 0.5);
      k.data(n, 3 * i + 2) = (i % 2 == 0) ? 1.0 : 0.6;
    }

  DegradationSpec spec;
  spec.gaussian_sigma = 0.05;
  spec.rng_seed = 7;
  const KeypointSequence a = degrade_keypoints(k, spec);
  const KeypointSequence b = degrade_keypoints(k, spec);
  CHECK((a.data - b.data).cwiseAbs().maxCoeff() == 0.0);

  for (int n = 0; n < 10; ++n)
    for (int i = 0; i < 4; ++i) {
      CHECK(a.confidence(n, i) == k.confidence(n, i));
      CHECK(a.x(n, i) != k.x(n, i));  // noise did land on the coordinates
    }
}

TEST_CASE("degrade_keypoints: noise generator is unbiased (1e5 draws)") {
  KeypointSequence k;
  k.keypoint_count = 25;
  k.data = Mat::Zero(2000, 75);
  for (int n = 0; n < 2000; ++n)
    for (int i = 0; i < 25; ++i) k.data(n, 3 * i + 2) = 1.0;

  DegradationSpec spec;
  spec.gaussian_sigma = 0.1;
  spec.rng_seed = 1234;
  const KeypointSequence out = degrade_keypoints(k, spec);

  double sum = 0.0;
  long count = 0;
  for (int n = 0; n < 2000; ++n)
    for (int i = 0; i < 25; ++i) {
      sum += out.x(n, i) + out.y(n, i);
      count += 2;
    }
  const double mean = sum / static_cast<double>(count);
  CHECK(std::abs(mean) < 3.0 * 0.1 / std::sqrt(static_cast<double>(count)));
}

TEST_CASE("degrade_keypoints: dropout zeroes individual keypoints") {
  KeypointSequence k;
  k.keypoint_count = 10;
  k.data = Mat::Ones(50, 30);

  DegradationSpec spec;
  spec.per_keypoint_dropout_prob = 0.3;
  spec.rng_seed = 5;
  const KeypointSequence out = degrade_keypoints(k, spec);

  int dropped = 0;
  for (int n = 0; n < 50; ++n)
    for (int i = 0; i < 10; ++i) {
      if (out.confidence(n, i) == 0.0) {
        ++dropped;
        CHECK(out.x(n, i) == 0.0);
        CHECK(out.y(n, i) == 0.0);
      } else {
        CHECK(out.confidence(n, i) == 1.0);
      }
    }
  CHECK(dropped > 50);   // ~150 expected
  CHECK(dropped < 300);
}

TEST_CASE("degradation spec validation") {
  DegradationSpec spec;
  spec.occluded_frame_intervals = {{-1, 3}};
  CHECK_THROWS_AS(spec.validate(10), InvalidConfig);
  spec.occluded_frame_intervals = {{0, 11}};
  CHECK_THROWS_AS(spec.validate(10), InvalidConfig);
  spec.occluded_frame_intervals.clear();
  spec.per_keypoint_dropout_prob = 1.5;
  CHECK_THROWS_AS(spec.validate(10), InvalidConfig);
}
