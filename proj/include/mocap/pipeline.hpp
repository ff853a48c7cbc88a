#pragma once

#include <functional>

#include "mocap/dataset.hpp"
#include "mocap/diffusion.hpp"
#include "mocap/optimizer.hpp"

namespace mocap {

struct TrainConfig {
  int batch_size = 64;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.01;
  long total_steps = 1000;
  std::uint64_t seed = 1;
  int timesteps = 1000;
  long checkpoint_every = 0;  // 0: no periodic snapshots

  void validate() const;
  AdamWConfig adam() const;
};

struct LossCurve {
  std::vector<std::pair<long, double>> entries;  // (step, batch-mean loss)
};

struct TrainHooks {
  std::function<void(long step, double loss)> on_step;
};

/// Denoising-objective training of one stage. Deterministic given the seed:
/// the minibatch permutation is a pure function of the epoch index and every
/// stochastic draw comes from a per-step stream, so a run resumed from step
/// k reproduces an unbroken run bit for bit. The optimizer's step counter
/// decides where to resume; training runs until cfg.total_steps.
LossCurve train_diffusion_stage(Denoiser& model, AdamW& opt, const NoiseSchedule& sched,
                                const WindowDataset& data, TargetKind target,
                                const TrainConfig& cfg, const TrainHooks& hooks = {});

/// Same loop, plain MSE regression: x_t pinned to zero, t = 0, no diffusion.
/// Shares the backbone so parameter counts match the denoiser exactly.
LossCurve train_regressor_stage(Denoiser& model, AdamW& opt, const WindowDataset& data,
                                TargetKind target, const TrainConfig& cfg,
                                const TrainHooks& hooks = {});

/// Single deterministic forward of a regressor backbone.
Mat regressor_predict(Denoiser& model, const DenoiserInputs& in);

/// Samples stage-1 joint positions for every window and stores them in
/// window.aux, once; pose-stage training reuses the cache across epochs.
void cache_stage1_samples(Denoiser& joint, const NoiseSchedule& sched, WindowDataset& data,
                          int sampling_steps, std::uint64_t seed);

struct WindowEstimate {
  Mat positions;  // N x 3J
  Mat rotations;  // N x 6J
};

/// Stage 1 only: sample joint positions for one window.
Mat infer_window_positions(Denoiser& joint, const NoiseSchedule& sched, const Mat& imu,
                           const Mat& keypoints, int sampling_steps, std::uint64_t seed);

/// Two-stage inference: joint positions, then rotations conditioned on them.
WindowEstimate infer_window(Denoiser& joint, Denoiser& pose, const NoiseSchedule& sched,
                            const Mat& imu, const Mat& keypoints, int sampling_steps,
                            std::uint64_t seed);

/// One-stage variant: rotations sampled directly from (imu, keypoints).
Mat infer_window_rotations_direct(Denoiser& direct, const NoiseSchedule& sched, const Mat& imu,
                                  const Mat& keypoints, int sampling_steps, std::uint64_t seed);

}  // namespace mocap
