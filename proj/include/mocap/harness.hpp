#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mocap/container.hpp"
#include "mocap/metrics.hpp"
#include "mocap/pipeline.hpp"
#include "mocap/streaming.hpp"

namespace mocap {

/// One window of inference under a deterministic per-window seed.
using WindowEstimatorFn =
    std::function<std::pair<Mat, Mat>(const Mat& imu, const Mat& keypoints,
                                      std::uint64_t window_seed)>;

/// A full system under evaluation: produces per-window positions (may be
/// empty when rot_dim > 0) and/or rotations. When rotations are present the
/// evaluation metric is computed on their forward kinematics, which puts
/// one-stage, two-stage, and regressor variants on the same footing.
struct Estimator {
  std::string label;
  int window = 60;
  int pos_dim = 0;
  int rot_dim = 0;
  WindowEstimatorFn run;
};

Estimator make_two_stage_estimator(Denoiser& joint, Denoiser& pose, const NoiseSchedule& sched,
                                   int sampling_steps);
Estimator make_one_stage_estimator(Denoiser& direct, const NoiseSchedule& sched,
                                   int sampling_steps);
Estimator make_joint_only_estimator(Denoiser& joint, const NoiseSchedule& sched,
                                    int sampling_steps);
Estimator make_regressor_joint_estimator(Denoiser& regressor);
Estimator make_regressor_two_stage_estimator(Denoiser& joint_reg, Denoiser& pose_reg);
/// Diffusion stage 1 with a deterministic regression replacing stage 2.
Estimator make_hybrid_pose_regressor_estimator(Denoiser& joint, const NoiseSchedule& sched,
                                               int sampling_steps, Denoiser& pose_reg);

struct EvalOptions {
  int sampling_steps = 5;
  int slide = 30;
  double sigma = 0.0;
  double keypoint_dropout = 0.0;
  std::vector<FrameInterval> occlusion_intervals;  // applied to every sequence
  std::uint64_t seed = 7;
  std::string dataset_id = "val";
};

/// Full-sequence sliding-window evaluation of an estimator over a container
/// set. Keypoints are degraded per the options before inference; metrics
/// compare against the stored ground-truth positions.
MetricReport evaluate(const Estimator& estimator, const std::vector<SequenceContainer>& data,
                      const SkeletonModel& skeleton, const EvalOptions& options);

/// Identical protocol per conditioning mode, clean and degraded; the caller
/// supplies one trained estimator per mode.
struct AblationRow {
  std::string mode;
  MetricReport clean;
  MetricReport degraded;
};
std::vector<AblationRow> ablation_conditioning(const std::vector<Estimator>& estimators,
                                               const std::vector<SequenceContainer>& data,
                                               const SkeletonModel& skeleton,
                                               const EvalOptions& clean,
                                               const EvalOptions& degraded);

std::vector<MetricReport> robustness_sweep(const Estimator& estimator,
                                           const std::vector<SequenceContainer>& data,
                                           const SkeletonModel& skeleton,
                                           const EvalOptions& base,
                                           const std::vector<double>& sigmas);

std::vector<MetricReport> steps_sweep(const std::function<Estimator(int)>& make_estimator,
                                      const std::vector<SequenceContainer>& data,
                                      const SkeletonModel& skeleton, const EvalOptions& base,
                                      const std::vector<int>& steps);

std::vector<MetricReport> sliding_sweep(const Estimator& estimator,
                                        const std::vector<SequenceContainer>& data,
                                        const SkeletonModel& skeleton, const EvalOptions& base,
                                        const std::vector<int>& slides);

}  // namespace mocap
