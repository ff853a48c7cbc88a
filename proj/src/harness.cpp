#include "mocap/harness.hpp"

#include "mocap/errors.hpp"
#include "mocap/sensors.hpp"

namespace mocap {

namespace {

constexpr std::uint64_t kDegradeTag = 0xDE6ADEULL;
constexpr std::uint64_t kSequenceTag = 0x5345514EULL;

Mat empty_mat(int rows) { return Mat::Zero(rows, 0); }

}  // namespace

Estimator make_two_stage_estimator(Denoiser& joint, Denoiser& pose, const NoiseSchedule& sched,
                                   int sampling_steps) {
  Estimator e;
  e.label = to_string(joint.config().mode);
  e.window = joint.config().window;
  e.pos_dim = joint.config().target_dim;
  e.rot_dim = pose.config().target_dim;
  e.run = [&joint, &pose, &sched, sampling_steps](const Mat& imu, const Mat& kp,
                                                  std::uint64_t seed) {
    const WindowEstimate est = infer_window(joint, pose, sched, imu, kp, sampling_steps, seed);
    return std::make_pair(est.positions, est.rotations);
  };
  return e;
}

Estimator make_one_stage_estimator(Denoiser& direct, const NoiseSchedule& sched,
                                   int sampling_steps) {
  Estimator e;
  e.label = "one-stage";
  e.window = direct.config().window;
  e.pos_dim = 0;
  e.rot_dim = direct.config().target_dim;
  e.run = [&direct, &sched, sampling_steps](const Mat& imu, const Mat& kp,
                                            std::uint64_t seed) {
    const Mat rot = infer_window_rotations_direct(direct, sched, imu, kp, sampling_steps, seed);
    return std::make_pair(empty_mat(static_cast<int>(rot.rows())), rot);
  };
  return e;
}

Estimator make_joint_only_estimator(Denoiser& joint, const NoiseSchedule& sched,
                                    int sampling_steps) {
  Estimator e;
  e.label = to_string(joint.config().mode);
  e.window = joint.config().window;
  e.pos_dim = joint.config().target_dim;
  e.rot_dim = 0;
  e.run = [&joint, &sched, sampling_steps](const Mat& imu, const Mat& kp, std::uint64_t seed) {
    const Mat pos = infer_window_positions(joint, sched, imu, kp, sampling_steps, seed);
    return std::make_pair(pos, empty_mat(static_cast<int>(pos.rows())));
  };
  return e;
}

Estimator make_regressor_joint_estimator(Denoiser& regressor) {
  Estimator e;
  e.label = "regressor";
  e.window = regressor.config().window;
  e.pos_dim = regressor.config().target_dim;
  e.rot_dim = 0;
  e.run = [&regressor](const Mat& imu, const Mat& kp, std::uint64_t) {
    DenoiserInputs in;
    if (regressor.config().imu_dim > 0) in.imu = &imu;
    if (regressor.config().keypoint_dim > 0) in.keypoints = &kp;
    const Mat pos = regressor_predict(regressor, in);
    return std::make_pair(pos, empty_mat(static_cast<int>(pos.rows())));
  };
  return e;
}

Estimator make_regressor_two_stage_estimator(Denoiser& joint_reg, Denoiser& pose_reg) {
  Estimator e;
  e.label = "regressor";
  e.window = joint_reg.config().window;
  e.pos_dim = joint_reg.config().target_dim;
  e.rot_dim = pose_reg.config().target_dim;
  e.run = [&joint_reg, &pose_reg](const Mat& imu, const Mat& kp, std::uint64_t) {
    DenoiserInputs in1;
    if (joint_reg.config().imu_dim > 0) in1.imu = &imu;
    if (joint_reg.config().keypoint_dim > 0) in1.keypoints = &kp;
    const Mat pos = regressor_predict(joint_reg, in1);
    DenoiserInputs in2;
    if (pose_reg.config().imu_dim > 0) in2.imu = &imu;
    in2.aux = &pos;
    const Mat rot = regressor_predict(pose_reg, in2);
    return std::make_pair(pos, rot);
  };
  return e;
}

Estimator make_hybrid_pose_regressor_estimator(Denoiser& joint, const NoiseSchedule& sched,
                                               int sampling_steps, Denoiser& pose_reg) {
  Estimator e;
  e.label = "pose-regressor";
  e.window = joint.config().window;
  e.pos_dim = joint.config().target_dim;
  e.rot_dim = pose_reg.config().target_dim;
  e.run = [&joint, &sched, sampling_steps, &pose_reg](const Mat& imu, const Mat& kp,
                                                      std::uint64_t seed) {
    const Mat pos = infer_window_positions(joint, sched, imu, kp, sampling_steps, seed);
    DenoiserInputs in;
    if (pose_reg.config().imu_dim > 0) in.imu = &imu;
    in.aux = &pos;
    const Mat rot = regressor_predict(pose_reg, in);
    return std::make_pair(pos, rot);
  };
  return e;
}

MetricReport evaluate(const Estimator& estimator, const std::vector<SequenceContainer>& data,
                      const SkeletonModel& skeleton, const EvalOptions& options) {
  if (!estimator.run) throw MissingModel("evaluate: estimator has no model bound");
  if (data.empty()) throw InvalidConfig("evaluate: empty dataset");

  std::vector<SequenceMetrics> rows;
  double fps = data.front().fps;

  for (std::size_t s = 0; s < data.size(); ++s) {
    const SequenceContainer& seq = data[s];
    const std::uint64_t seq_seed = mix_seed(options.seed, kSequenceTag, s);

    DegradationSpec spec;
    spec.gaussian_sigma = options.sigma;
    spec.per_keypoint_dropout_prob = options.keypoint_dropout;
    for (const auto& [a, b] : options.occlusion_intervals)
      spec.occluded_frame_intervals.push_back(
          {std::min(a, seq.frames), std::min(b, seq.frames)});
    spec.rng_seed = mix_seed(seq_seed, kDegradeTag);

    KeypointSequence kp;
    kp.keypoint_count = seq.keypoint_count;
    kp.data = seq.keypoints;
    kp = degrade_keypoints(kp, spec);

    const WindowInferFn fn = [&](const Mat& imu, const Mat& keypoints, long start) {
      return estimator.run(imu, keypoints, mix_seed(seq_seed, static_cast<std::uint64_t>(start)));
    };
    const auto [pos, rot] = offline_sliding_inference(
        seq.imu, kp.data, fn, estimator.window, options.slide, estimator.pos_dim,
        estimator.rot_dim);

    const Mat& pred_positions = estimator.rot_dim > 0
                                    ? forward_kinematics(skeleton, rot)
                                    : pos;

    SequenceMetrics row;
    row.name = "seq" + std::to_string(s);
    row.frames = seq.frames;
    row.mpjpe_mm = mpjpe_mm(pred_positions, seq.positions, skeleton.root_index);
    row.pa_mpjpe_mm = pa_mpjpe_mm(pred_positions, seq.positions, skeleton.root_index);
    rows.push_back(row);
  }

  EvalFingerprint fp;
  fp.mode = estimator.label;
  fp.dataset_id = options.dataset_id;
  fp.sampling_steps = options.sampling_steps;
  fp.sigma = options.sigma;
  fp.slide = options.slide;
  MetricReport report = aggregate_report(std::move(rows), fp, options.seed);
  report.latency_s = latency_report(options.slide, fps);
  return report;
}

std::vector<AblationRow> ablation_conditioning(const std::vector<Estimator>& estimators,
                                               const std::vector<SequenceContainer>& data,
                                               const SkeletonModel& skeleton,
                                               const EvalOptions& clean,
                                               const EvalOptions& degraded) {
  if (estimators.empty()) throw MissingModel("ablation: no estimators supplied");
  std::vector<AblationRow> rows;
  for (const Estimator& est : estimators) {
    AblationRow row;
    row.mode = est.label;
    row.clean = evaluate(est, data, skeleton, clean);
    row.degraded = evaluate(est, data, skeleton, degraded);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<MetricReport> robustness_sweep(const Estimator& estimator,
                                           const std::vector<SequenceContainer>& data,
                                           const SkeletonModel& skeleton,
                                           const EvalOptions& base,
                                           const std::vector<double>& sigmas) {
  std::vector<MetricReport> out;
  for (const double sigma : sigmas) {
    EvalOptions opt = base;
    opt.sigma = sigma;
    out.push_back(evaluate(estimator, data, skeleton, opt));
  }
  return out;
}

std::vector<MetricReport> steps_sweep(const std::function<Estimator(int)>& make_estimator,
                                      const std::vector<SequenceContainer>& data,
                                      const SkeletonModel& skeleton, const EvalOptions& base,
                                      const std::vector<int>& steps) {
  std::vector<MetricReport> out;
  for (const int s : steps) {
    EvalOptions opt = base;
    opt.sampling_steps = s;
    out.push_back(evaluate(make_estimator(s), data, skeleton, opt));
  }
  return out;
}

std::vector<MetricReport> sliding_sweep(const Estimator& estimator,
                                        const std::vector<SequenceContainer>& data,
                                        const SkeletonModel& skeleton, const EvalOptions& base,
                                        const std::vector<int>& slides) {
  std::vector<MetricReport> out;
  for (const int s : slides) {
    EvalOptions opt = base;
    opt.slide = s;
    out.push_back(evaluate(estimator, data, skeleton, opt));
  }
  return out;
}

}  // namespace mocap
