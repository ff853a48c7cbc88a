#include "mocap/synth.hpp"

#include <Eigen/Geometry>
#include <cmath>

#include "mocap/errors.hpp"
#include "mocap/random.hpp"

namespace mocap {

namespace {

constexpr std::uint64_t kSequenceTag = 0x53455153ULL;

double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

Rot6d to6(const Mat3& R) {
  Rot6d r;
  r.head<3>() = R.col(0);
  r.tail<3>() = R.col(1);
  return r;
}

Vec3 random_axis(RandomStream& rng) {
  Vec3 a(rng.normal(), rng.normal(), rng.normal());
  while (a.norm() < 1e-6) a = Vec3(rng.normal(), rng.normal(), rng.normal());
  return a.normalized();
}

/// Periodic swings: every joint oscillates about a fixed axis on top of a
/// small random base pose; limb frequencies reach a few Hz.
Mat periodic_motion(RandomStream& rng, const SkeletonModel& body, int frames, double fps) {
  const int J = body.joint_count;
  std::vector<Vec3> axis(J);
  std::vector<double> amp(J), freq(J), phase(J), base(J);
  std::vector<Vec3> base_axis(J);
  for (int j = 0; j < J; ++j) {
    axis[j] = random_axis(rng);
    base_axis[j] = random_axis(rng);
    const bool is_root = j == body.root_index;
    amp[j] = is_root ? rng.uniform(0.1, 0.3) : rng.uniform(0.2, 0.8);
    freq[j] = rng.uniform(0.5, 2.5);
    phase[j] = rng.uniform(0.0, 2.0 * M_PI);
    base[j] = rng.uniform(0.0, 0.3);
  }
  Mat rot(frames, 6 * J);
  for (int n = 0; n < frames; ++n) {
    const double t = static_cast<double>(n) / fps;
    for (int j = 0; j < J; ++j) {
      const double angle = amp[j] * std::sin(2.0 * M_PI * freq[j] * t + phase[j]);
      const Mat3 R = Eigen::AngleAxisd(base[j], base_axis[j]).toRotationMatrix() *
                     Eigen::AngleAxisd(angle, axis[j]).toRotationMatrix();
      rot.block<1, 6>(n, 6 * j) = to6(R).transpose();
    }
  }
  return rot;
}

/// Smooth drift: random quaternion knots every ~1.5 s, slerped with
/// smoothstep easing.
Mat spline_motion(RandomStream& rng, const SkeletonModel& body, int frames, double fps) {
  const int J = body.joint_count;
  const int knot_stride = std::max(2, static_cast<int>(std::lround(1.5 * fps)));
  const int knots = frames / knot_stride + 2;

  std::vector<std::vector<Eigen::Quaterniond>> key(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    key[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(knots));
    for (int k = 0; k < knots; ++k) {
      const double angle = rng.uniform(0.0, j == body.root_index ? 0.4 : 0.7);
      key[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
          Eigen::Quaterniond(Eigen::AngleAxisd(angle, random_axis(rng)));
    }
  }
  Mat rot(frames, 6 * J);
  for (int n = 0; n < frames; ++n) {
    const int k = n / knot_stride;
    const double u = smoothstep(static_cast<double>(n % knot_stride) / knot_stride);
    for (int j = 0; j < J; ++j) {
      const auto& keys = key[static_cast<std::size_t>(j)];
      const Eigen::Quaterniond q =
          keys[static_cast<std::size_t>(k)].slerp(u, keys[static_cast<std::size_t>(k) + 1]);
      rot.block<1, 6>(n, 6 * j) = to6(q.toRotationMatrix()).transpose();
    }
  }
  return rot;
}

/// One moderate random pose, held.
Mat static_motion(RandomStream& rng, const SkeletonModel& body, int frames) {
  const int J = body.joint_count;
  Mat frame(1, 6 * J);
  for (int j = 0; j < J; ++j) {
    const double angle = rng.uniform(0.0, 0.6);
    const Mat3 R = Eigen::AngleAxisd(angle, random_axis(rng)).toRotationMatrix();
    frame.block<1, 6>(0, 6 * j) = to6(R).transpose();
  }
  return frame.replicate(frames, 1);
}

/// Slow sinusoidal wander of the pelvis around the standing point.
Mat root_path(RandomStream& rng, int frames, double fps, bool hold_still) {
  Mat path(frames, 3);
  const Vec3 center(0.0, 0.9, 0.0);
  if (hold_still) {
    for (int n = 0; n < frames; ++n) path.row(n) = center.transpose();
    return path;
  }
  const Vec3 amplitude(rng.uniform(0.1, 0.4), rng.uniform(0.02, 0.1), rng.uniform(0.1, 0.4));
  Vec3 freq, phase;
  for (int a = 0; a < 3; ++a) {
    freq(a) = rng.uniform(0.05, 0.3);
    phase(a) = rng.uniform(0.0, 2.0 * M_PI);
  }
  for (int n = 0; n < frames; ++n) {
    const double t = static_cast<double>(n) / fps;
    for (int a = 0; a < 3; ++a)
      path(n, a) = center(a) + amplitude(a) * std::sin(2.0 * M_PI * freq(a) * t + phase(a));
  }
  return path;
}

}  // namespace

void SynthConfig::validate() const {
  if (sequences < 1) throw InvalidConfig("synth: sequences must be >= 1");
  if (frames < 3) throw InvalidConfig("synth: frames must be >= 3 (IMU synthesis needs 3)");
  if (!(fps > 0.0)) throw InvalidConfig("synth: fps must be positive");
  if (keypoint_noise < 0.0) throw InvalidConfig("synth: negative keypoint noise");
  if (keypoint_dropout < 0.0 || keypoint_dropout > 1.0)
    throw InvalidConfig("synth: keypoint dropout outside [0,1]");
  intrinsics.validate();
}

SequenceContainer synthesize_sequence(const SkeletonModel& skeleton, const KeypointMap& map,
                                      const SynthConfig& cfg, int index) {
  cfg.validate();
  RandomStream rng(mix_seed(cfg.seed, kSequenceTag, static_cast<std::uint64_t>(index)));

  MotionSequence motion;
  motion.joints = skeleton.joint_count;
  motion.fps = cfg.fps;
  const int regime = index % 3;
  switch (regime) {
    case 0: motion.rotations = periodic_motion(rng, skeleton, cfg.frames, cfg.fps); break;
    case 1: motion.rotations = spline_motion(rng, skeleton, cfg.frames, cfg.fps); break;
    default: motion.rotations = static_motion(rng, skeleton, cfg.frames); break;
  }
  motion.positions = forward_kinematics(skeleton, motion.rotations);

  const ImuSequence imu = synthesize_imu(skeleton, motion);

  // Camera 4.2 m in front of the standing point, level with the pelvis.
  CameraPose camera;
  camera.translation = Vec3(0.0, -0.9, 4.2);
  const Mat translation = root_path(rng, cfg.frames, cfg.fps, /*hold_still=*/regime == 2);
  const RawKeypointSequence raw =
      project_keypoints(skeleton, motion, map, cfg.intrinsics, camera, translation);
  KeypointSequence keypoints = preprocess_keypoints(raw, map, cfg.intrinsics);

  DegradationSpec spec;
  spec.gaussian_sigma = cfg.keypoint_noise;
  spec.per_keypoint_dropout_prob = cfg.keypoint_dropout;
  spec.rng_seed = rng.next_u64();
  if (cfg.occlusion) {
    const int intervals = 1 + static_cast<int>(rng.uniform_int(0, 1));
    for (int i = 0; i < intervals; ++i) {
      const int len = static_cast<int>(rng.uniform(0.10, 0.25) * cfg.frames);
      const int start =
          static_cast<int>(rng.uniform_int(0, std::max(1, cfg.frames - len - 1)));
      spec.occluded_frame_intervals.push_back({start, std::min(cfg.frames, start + len)});
    }
  }
  keypoints = degrade_keypoints(keypoints, spec);

  SequenceContainer out;
  out.fps = cfg.fps;
  out.frames = cfg.frames;
  out.joints = skeleton.joint_count;
  out.keypoint_count = map.count();
  out.rotations = motion.rotations;
  out.positions = motion.positions;
  out.imu = imu.data;
  out.keypoints = keypoints.data;
  out.validate();
  return out;
}

std::vector<SequenceContainer> synthesize_dataset(const SkeletonModel& skeleton,
                                                  const KeypointMap& map,
                                                  const SynthConfig& cfg) {
  std::vector<SequenceContainer> out;
  out.reserve(static_cast<std::size_t>(cfg.sequences));
  for (int i = 0; i < cfg.sequences; ++i)
    out.push_back(synthesize_sequence(skeleton, map, cfg, i));
  return out;
}

}  // namespace mocap
