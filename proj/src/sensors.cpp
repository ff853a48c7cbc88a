#include "mocap/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mocap/errors.hpp"
#include "mocap/random.hpp"

namespace mocap {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0))
    throw InvalidConfig("intrinsics: focal lengths must be positive");
  if (!(width > 0.0) || !(height > 0.0))
    throw InvalidConfig("intrinsics: image size must be positive");
}

void DegradationSpec::validate(int frames) const {
  auto check_intervals = [&](const std::vector<FrameInterval>& v, const char* what) {
    for (const auto& [a, b] : v)
      if (a < 0 || b > frames || a > b)
        throw InvalidConfig(std::string("degradation: ") + what + " interval [" +
                            std::to_string(a) + "," + std::to_string(b) +
                            ") outside [0," + std::to_string(frames) + ")");
  };
  check_intervals(occluded_frame_intervals, "occlusion");
  check_intervals(out_of_view_intervals, "out-of-view");
  if (per_keypoint_dropout_prob < 0.0 || per_keypoint_dropout_prob > 1.0)
    throw InvalidConfig("degradation: dropout probability outside [0,1]");
  if (gaussian_sigma < 0.0) throw InvalidConfig("degradation: negative sigma");
}

KeypointMap KeypointMap::default_map() {
  // Detector landmark -> body joint. Face landmarks (0-10) collapse onto the
  // head, hand landmarks (17-22) onto the hand joints, foot landmarks (29-32)
  // onto the feet. Index 0 is repurposed as the pelvis root so the root
  // normalization has an anchor.
  KeypointMap m;
  m.keypoint_to_joint = {
      0,   //  0 pelvis (root anchor)
      15,  //  1 left eye inner
      15,  //  2 left eye
      15,  //  3 left eye outer
      15,  //  4 right eye inner
      15,  //  5 right eye
      15,  //  6 right eye outer
      15,  //  7 left ear
      15,  //  8 right ear
      12,  //  9 mouth left
      12,  // 10 mouth right
      16,  // 11 left shoulder
      17,  // 12 right shoulder
      18,  // 13 left elbow
      19,  // 14 right elbow
      20,  // 15 left wrist
      21,  // 16 right wrist
      22,  // 17 left pinky
      23,  // 18 right pinky
      22,  // 19 left index
      23,  // 20 right index
      22,  // 21 left thumb
      23,  // 22 right thumb
      1,   // 23 left hip
      2,   // 24 right hip
      4,   // 25 left knee
      5,   // 26 right knee
      7,   // 27 left ankle
      8,   // 28 right ankle
      7,   // 29 left heel
      8,   // 30 right heel
      10,  // 31 left foot index
      11,  // 32 right foot index
  };
  m.root_keypoint = 0;
  return m;
}

Mat central_acceleration(const Mat& positions, double fps) {
  const int n = static_cast<int>(positions.rows());
  if (n < 3)
    throw TooShortSequence("central_acceleration: need at least 3 frames, got " +
                           std::to_string(n));
  Mat acc(n, positions.cols());
  const double f2 = fps * fps;
  for (int i = 1; i + 1 < n; ++i)
    acc.row(i) = (positions.row(i + 1) - 2.0 * positions.row(i) + positions.row(i - 1)) * f2;
  acc.row(0) = acc.row(1);
  acc.row(n - 1) = acc.row(n - 2);
  return acc;
}

ImuSequence synthesize_imu(const SkeletonModel& skeleton, const MotionSequence& motion,
                           int smooth_radius) {
  const int frames = motion.frames();
  if (frames < 3)
    throw TooShortSequence("synthesize_imu: need at least 3 frames, got " +
                           std::to_string(frames));
  if (!(motion.fps > 0.0)) throw InvalidConfig("synthesize_imu: fps must be positive");

  const FkResult fk = forward_kinematics_full(skeleton, motion.rotations);
  const int joints = skeleton.joint_count;

  ImuSequence imu;
  imu.data.setZero(frames, kImuChannels);

  for (int s = 0; s < kImuCount; ++s) {
    const int site = skeleton.imu_site_joints[static_cast<std::size_t>(s)];
    Mat site_positions = fk.positions.middleCols(3 * site, 3);
    Mat acc = central_acceleration(site_positions, motion.fps);
    if (smooth_radius > 0) {
      Mat smoothed(frames, 3);
      for (int i = 0; i < frames; ++i) {
        const int lo = std::max(0, i - smooth_radius);
        const int hi = std::min(frames - 1, i + smooth_radius);
        smoothed.row(i) = acc.middleRows(lo, hi - lo + 1).colwise().mean();
      }
      acc = smoothed;
    }
    const int base = s * kImuChannelsPerSensor;
    for (int n = 0; n < frames; ++n) {
      const Mat3& R = fk.rotation(n, site, joints);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) imu.data(n, base + 3 * r + c) = R(r, c);
      imu.data.block<1, 3>(n, base + 9) = acc.row(n);
    }
  }
  return imu;
}

RawKeypointSequence project_keypoints(const SkeletonModel& skeleton,
                                      const MotionSequence& motion, const KeypointMap& map,
                                      const CameraIntrinsics& intrinsics,
                                      const CameraPose& camera_pose,
                                      const Mat& root_translation) {
  intrinsics.validate();
  if (!motion.has_positions())
    throw ShapeMismatch("project_keypoints: motion has no positions (run FK first)");
  const int frames = motion.frames();
  if (root_translation.rows() != frames || root_translation.cols() != 3)
    throw ShapeMismatch("project_keypoints: root_translation must be N x 3");
  const int K = map.count();

  RawKeypointSequence raw;
  raw.keypoint_count = K;
  raw.data.setZero(frames, 3 * K);

  for (int n = 0; n < frames; ++n) {
    for (int k = 0; k < K; ++k) {
      const int joint = map.keypoint_to_joint[static_cast<std::size_t>(k)];
      if (joint < 0 || joint >= skeleton.joint_count)
        throw InvalidConfig("keypoint map references joint " + std::to_string(joint));
      const Vec3 world = root_translation.row(n).transpose() + motion.position(n, joint);
      const Vec3 cam = camera_pose.rotation * world + camera_pose.translation;
      if (cam.z() <= 1e-6) continue;  // behind the camera: sentinel stays
      const double u = intrinsics.fx * cam.x() / cam.z() + intrinsics.cx;
      const double v = intrinsics.fy * cam.y() / cam.z() + intrinsics.cy;
      if (u < 0.0 || u >= intrinsics.width || v < 0.0 || v >= intrinsics.height) continue;
      raw.data(n, 3 * k) = u;
      raw.data(n, 3 * k + 1) = v;
      raw.data(n, 3 * k + 2) = 1.0;
    }
  }
  return raw;
}

KeypointSequence preprocess_keypoints(const RawKeypointSequence& raw, const KeypointMap& map,
                                      const CameraIntrinsics& intrinsics) {
  intrinsics.validate();
  const int frames = raw.frames();
  const int K = raw.keypoint_count;
  const int root = map.root_keypoint;

  KeypointSequence out;
  out.keypoint_count = K;
  out.data.setZero(frames, 3 * K);

  for (int n = 0; n < frames; ++n) {
    // Plane coordinates first; sentinels stay at 0.
    for (int k = 0; k < K; ++k) {
      const double conf = raw.data(n, 3 * k + 2);
      out.data(n, 3 * k + 2) = conf;
      if (conf <= 0.0) continue;
      out.data(n, 3 * k) = (raw.data(n, 3 * k) - intrinsics.cx) / intrinsics.fx;
      out.data(n, 3 * k + 1) = (raw.data(n, 3 * k + 1) - intrinsics.cy) / intrinsics.fy;
    }
    const double root_x = out.data(n, 3 * root);
    const double root_y = out.data(n, 3 * root + 1);
    for (int k = 0; k < K; ++k) {
      if (k == root) continue;  // root keeps its absolute plane position
      if (out.data(n, 3 * k + 2) <= 0.0) continue;
      out.data(n, 3 * k) -= root_x;
      out.data(n, 3 * k + 1) -= root_y;
    }
  }
  return out;
}

KeypointSequence degrade_keypoints(const KeypointSequence& keypoints,
                                   const DegradationSpec& spec) {
  const int frames = keypoints.frames();
  const int K = keypoints.keypoint_count;
  spec.validate(frames);

  std::vector<bool> blanked(static_cast<std::size_t>(frames), false);
  for (const auto& [a, b] : spec.occluded_frame_intervals)
    for (int n = a; n < b; ++n) blanked[static_cast<std::size_t>(n)] = true;
  for (const auto& [a, b] : spec.out_of_view_intervals)
    for (int n = a; n < b; ++n) blanked[static_cast<std::size_t>(n)] = true;

  KeypointSequence out = keypoints;
  RandomStream rng(spec.rng_seed);

  for (int n = 0; n < frames; ++n) {
    if (blanked[static_cast<std::size_t>(n)]) {
      out.data.row(n).setZero();
      continue;
    }
    for (int k = 0; k < K; ++k) {
      double& conf = out.data(n, 3 * k + 2);
      if (spec.per_keypoint_dropout_prob > 0.0 &&
          rng.uniform() < spec.per_keypoint_dropout_prob) {
        out.data(n, 3 * k) = 0.0;
        out.data(n, 3 * k + 1) = 0.0;
        conf = 0.0;
        continue;
      }
      if (spec.gaussian_sigma > 0.0 && conf > 0.0) {
        out.data(n, 3 * k) += rng.normal(0.0, spec.gaussian_sigma);
        out.data(n, 3 * k + 1) += rng.normal(0.0, spec.gaussian_sigma);
      }
    }
  }
  return out;
}

}  // namespace mocap
