#pragma once

#include <vector>

#include "mocap/container.hpp"
#include "mocap/denoiser.hpp"

namespace mocap {

/// One training window: aligned N-frame slices of the ground truth and the
/// observations. `aux` holds the cached stage-1 joint-position samples when
/// training the pose stage, otherwise it is empty.
struct Window {
  Mat positions;  // N x 3J
  Mat rotations;  // N x 6J
  Mat imu;        // N x 72
  Mat keypoints;  // N x 3K
  Mat aux;        // N x 3J or empty
  int source_sequence = 0;
  int start_frame = 0;
};

struct WindowDataset {
  int window = 60;
  int joints = 24;
  int keypoint_count = 33;
  std::vector<Window> windows;
};

/// Cuts contiguous windows with the given stride from each sequence. Every
/// sequence must carry rotations, positions, imu, and keypoints.
WindowDataset slice_windows(const std::vector<SequenceContainer>& sequences, int window,
                            int stride);

/// Builds the observation inputs for a window as the model config expects
/// them. Pointers alias the window's members.
DenoiserInputs window_inputs(const Window& w, const DenoiserConfig& cfg);

/// Which ground-truth tensor the model denoises.
enum class TargetKind { kPositions, kRotations };

const Mat& window_target(const Window& w, TargetKind kind);

/// Per-channel mean/std of the observation channels over the whole dataset;
/// standard deviations are floored at 1e-6.
NormStats compute_norm_stats(const DenoiserConfig& cfg, const WindowDataset& data);

}  // namespace mocap
