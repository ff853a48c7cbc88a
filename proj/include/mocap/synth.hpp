#pragma once

#include <cstdint>
#include <vector>

#include "mocap/container.hpp"
#include "mocap/sensors.hpp"

namespace mocap {

/// Procedural motion-and-sensor generation. Regimes rotate per sequence
/// index: fast periodic joint swings (dance analog), slow smooth drift on
/// the rotation manifold, and held static poses. Degradation settings are
/// baked into the stored keypoints; leave them zero for clean containers.
struct SynthConfig {
  int sequences = 8;
  int frames = 240;
  double fps = 60.0;
  std::uint64_t seed = 1;
  bool occlusion = false;           // scripted occlusion intervals
  double keypoint_noise = 0.0;      // Gaussian sigma on the Z=1 plane
  double keypoint_dropout = 0.0;    // per-keypoint dropout probability
  CameraIntrinsics intrinsics;

  void validate() const;
};

SequenceContainer synthesize_sequence(const SkeletonModel& skeleton, const KeypointMap& map,
                                      const SynthConfig& cfg, int index);

std::vector<SequenceContainer> synthesize_dataset(const SkeletonModel& skeleton,
                                                  const KeypointMap& map,
                                                  const SynthConfig& cfg);

}  // namespace mocap
