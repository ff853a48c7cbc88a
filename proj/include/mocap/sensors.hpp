#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mocap/skeleton.hpp"

namespace mocap {

constexpr int kImuChannelsPerSensor = 12;  // 3x3 orientation + 3 acceleration
constexpr int kImuChannels = kImuCount * kImuChannelsPerSensor;  // 72

/// Per-frame readings of the six body-worn sensors, flattened to 72 channels
/// in sensor order (left forearm, right forearm, left lower leg, right lower
/// leg, head, pelvis); per sensor the orientation matrix (row-major, 9
/// floats) precedes the acceleration (3 floats, m/s^2).
struct ImuSequence {
  Mat data;  // N x 72

  int frames() const { return static_cast<int>(data.rows()); }

  Mat3 orientation(int frame, int sensor) const {
    Mat3 R;
    const int base = sensor * kImuChannelsPerSensor;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) R(r, c) = data(frame, base + 3 * r + c);
    return R;
  }
  Vec3 acceleration(int frame, int sensor) const {
    const int base = sensor * kImuChannelsPerSensor + 9;
    return data.block<1, 3>(frame, base).transpose();
  }
};

/// Preprocessed 2D keypoints on the Z=1 plane with confidences, flattened to
/// [x, y, conf] per keypoint. The root keypoint keeps its absolute plane
/// position; all others are stored relative to the root. Invisible keypoints
/// carry confidence 0 and sentinel coordinates 0.
struct KeypointSequence {
  int keypoint_count = 0;
  Mat data;  // N x 3K

  int frames() const { return static_cast<int>(data.rows()); }
  double x(int frame, int k) const { return data(frame, 3 * k); }
  double y(int frame, int k) const { return data(frame, 3 * k + 1); }
  double confidence(int frame, int k) const { return data(frame, 3 * k + 2); }
};

/// Detector-style output in pixel coordinates, same [u, v, conf] layout.
struct RawKeypointSequence {
  int keypoint_count = 0;
  Mat data;  // N x 3K

  int frames() const { return static_cast<int>(data.rows()); }
};

struct CameraIntrinsics {
  double fx = 500.0, fy = 500.0;
  double cx = 320.0, cy = 240.0;
  double width = 640.0, height = 480.0;

  void validate() const;
};

/// Rigid world-to-camera transform: X_cam = rotation * X_world + translation.
struct CameraPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
};

/// Maps each detector keypoint to the skeleton joint it observes. Several
/// keypoints may share a joint (face/hand landmarks collapse onto the head
/// and hand joints).
struct KeypointMap {
  std::vector<int> keypoint_to_joint;
  int root_keypoint = 0;

  int count() const { return static_cast<int>(keypoint_to_joint.size()); }

  /// 33-keypoint detector layout mapped onto the default 24-joint body.
  static KeypointMap default_map();
};

using FrameInterval = std::pair<int, int>;  // [start, end)

struct DegradationSpec {
  std::vector<FrameInterval> occluded_frame_intervals;
  std::vector<FrameInterval> out_of_view_intervals;
  double per_keypoint_dropout_prob = 0.0;
  double gaussian_sigma = 0.0;  // on the Z=1 plane
  std::uint64_t rng_seed = 0;

  void validate(int frames) const;
};

/// Second central difference of a 3D trajectory, scaled by fps^2; the two
/// boundary frames copy their nearest interior value. Exact for trajectories
/// quadratic in time.
Mat central_acceleration(const Mat& positions, double fps);

/// Synthesizes the six sensors from a motion clip: orientations are the
/// forward-kinematics global rotations at the sensor joints (reused from one
/// FK pass, never recomputed), accelerations the central difference of the
/// sensor-joint positions. smooth_radius > 0 applies a centered moving
/// average of that radius to the accelerations.
ImuSequence synthesize_imu(const SkeletonModel& skeleton, const MotionSequence& motion,
                           int smooth_radius = 0);

/// Pinhole projection of the mapped joints. Points behind the camera or
/// outside the image get confidence 0 and sentinel coordinates 0; visible
/// points get confidence 1.
RawKeypointSequence project_keypoints(const SkeletonModel& skeleton,
                                      const MotionSequence& motion, const KeypointMap& map,
                                      const CameraIntrinsics& intrinsics,
                                      const CameraPose& camera_pose,
                                      const Mat& root_translation);

/// Reprojects pixels onto the Z=1 plane and root-normalizes: the root
/// keypoint keeps its absolute plane position, the rest become root-relative.
/// Zero-confidence keypoints keep sentinel 0 coordinates untouched.
KeypointSequence preprocess_keypoints(const RawKeypointSequence& raw, const KeypointMap& map,
                                      const CameraIntrinsics& intrinsics);

/// Applies scripted occlusion / out-of-view intervals, per-keypoint dropout,
/// and Gaussian plane noise. Noise never touches the confidence channel.
/// Deterministic for a fixed spec.
KeypointSequence degrade_keypoints(const KeypointSequence& keypoints,
                                   const DegradationSpec& spec);

}  // namespace mocap
