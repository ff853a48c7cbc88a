#include "mocap/pipeline.hpp"

#include <cmath>
#include <numeric>

#include "mocap/errors.hpp"

namespace mocap {

namespace {

// Stream tags keep the independent random streams from colliding.
constexpr std::uint64_t kEpochTag = 0x45504f4348ULL;   // batch permutations
constexpr std::uint64_t kStepTag = 0x53544550ULL;      // per-step draws
constexpr std::uint64_t kCacheTag = 0x50304341ULL;     // stage-1 sample cache
constexpr std::uint64_t kJointTag = 0x4a4f494eULL;     // stage-1 prior draw
constexpr std::uint64_t kPoseTag = 0x504f5345ULL;      // stage-2 prior draw

std::vector<int> epoch_permutation(int count, std::uint64_t seed, long epoch) {
  std::vector<int> idx(static_cast<std::size_t>(count));
  std::iota(idx.begin(), idx.end(), 0);
  RandomStream rng(mix_seed(seed, kEpochTag, static_cast<std::uint64_t>(epoch)));
  rng.shuffle(idx);
  return idx;
}

std::vector<int> batch_for_step(int window_count, int batch_size, std::uint64_t seed,
                                long step) {
  const long batches_per_epoch = (window_count + batch_size - 1) / batch_size;
  const long idx = step - 1;
  const long epoch = idx / batches_per_epoch;
  const long slot = idx % batches_per_epoch;
  const std::vector<int> perm = epoch_permutation(window_count, seed, epoch);
  const long lo = slot * batch_size;
  const long hi = std::min<long>(lo + batch_size, window_count);
  return std::vector<int>(perm.begin() + lo, perm.begin() + hi);
}

void scale_grads(Denoiser& model, double factor) {
  for (Param* p : model.params().all()) p->g *= factor;
}

DenoiseFn bind_inputs(Denoiser& model, const Mat* imu, const Mat* keypoints, const Mat* aux) {
  DenoiserInputs in;
  if (model.config().imu_dim > 0) in.imu = imu;
  if (model.config().keypoint_dim > 0) in.keypoints = keypoints;
  if (model.config().aux_dim > 0) in.aux = aux;
  return [&model, in](const Mat& x_t, int t) { return model.forward(x_t, t, in); };
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw InvalidConfig("train: batch_size must be >= 1");
  if (!(learning_rate > 0.0) && learning_rate != 0.0)
    throw InvalidConfig("train: learning_rate must be >= 0");
  if (total_steps < 0) throw InvalidConfig("train: total_steps must be >= 0");
  if (timesteps < 2) throw InvalidConfig("train: timesteps must be >= 2");
}

AdamWConfig TrainConfig::adam() const {
  AdamWConfig a;
  a.learning_rate = learning_rate;
  a.beta1 = adam_beta1;
  a.beta2 = adam_beta2;
  a.epsilon = adam_eps;
  a.weight_decay = weight_decay;
  return a;
}

LossCurve train_diffusion_stage(Denoiser& model, AdamW& opt, const NoiseSchedule& sched,
                                const WindowDataset& data, TargetKind target,
                                const TrainConfig& cfg, const TrainHooks& hooks) {
  cfg.validate();
  if (data.windows.empty()) throw InvalidConfig("train: empty dataset");
  const int W = static_cast<int>(data.windows.size());
  const bool uses_dropout = model.config().dropout > 0.0;

  LossCurve curve;
  for (long step = opt.steps_taken() + 1; step <= cfg.total_steps; ++step) {
    const std::vector<int> batch = batch_for_step(W, cfg.batch_size, cfg.seed, step);
    RandomStream step_rng(mix_seed(cfg.seed, kStepTag, static_cast<std::uint64_t>(step)));

    model.params().zero_grads();
    double loss_sum = 0.0;
    for (const int i : batch) {
      const Window& w = data.windows[static_cast<std::size_t>(i)];
      BoundDenoiser bound(model, window_inputs(w, model.config()), uses_dropout, &step_rng);
      loss_sum += training_loss(sched, bound, window_target(w, target), step_rng);
    }
    scale_grads(model, 1.0 / static_cast<double>(batch.size()));
    opt.step();

    const double loss = loss_sum / static_cast<double>(batch.size());
    curve.entries.emplace_back(step, loss);
    if (hooks.on_step) hooks.on_step(step, loss);
  }
  return curve;
}

LossCurve train_regressor_stage(Denoiser& model, AdamW& opt, const WindowDataset& data,
                                TargetKind target, const TrainConfig& cfg,
                                const TrainHooks& hooks) {
  cfg.validate();
  if (data.windows.empty()) throw InvalidConfig("train: empty dataset");
  const int W = static_cast<int>(data.windows.size());
  const bool uses_dropout = model.config().dropout > 0.0;
  const Mat zero_input = Mat::Zero(model.config().window, model.config().target_dim);

  LossCurve curve;
  for (long step = opt.steps_taken() + 1; step <= cfg.total_steps; ++step) {
    const std::vector<int> batch = batch_for_step(W, cfg.batch_size, cfg.seed, step);
    RandomStream step_rng(mix_seed(cfg.seed, kStepTag, static_cast<std::uint64_t>(step)));

    model.params().zero_grads();
    double loss_sum = 0.0;
    for (const int i : batch) {
      const Window& w = data.windows[static_cast<std::size_t>(i)];
      const Mat& x0 = window_target(w, target);
      const Mat pred = model.forward(zero_input, 0, window_inputs(w, model.config()),
                                     uses_dropout, &step_rng);
      const Mat diff = pred - x0;
      const double count = static_cast<double>(diff.size());
      const double loss = diff.squaredNorm() / count;
      if (!std::isfinite(loss))
        throw NonFiniteLoss("regressor training diverged at step " + std::to_string(step));
      model.backward((2.0 / count) * diff);
      loss_sum += loss;
    }
    scale_grads(model, 1.0 / static_cast<double>(batch.size()));
    opt.step();

    const double loss = loss_sum / static_cast<double>(batch.size());
    curve.entries.emplace_back(step, loss);
    if (hooks.on_step) hooks.on_step(step, loss);
  }
  return curve;
}

Mat regressor_predict(Denoiser& model, const DenoiserInputs& in) {
  const Mat zero_input = Mat::Zero(model.config().window, model.config().target_dim);
  return model.forward(zero_input, 0, in);
}

void cache_stage1_samples(Denoiser& joint, const NoiseSchedule& sched, WindowDataset& data,
                          int sampling_steps, std::uint64_t seed) {
  const int N = joint.config().window;
  const int dim = joint.config().target_dim;
  for (std::size_t i = 0; i < data.windows.size(); ++i) {
    Window& w = data.windows[i];
    const DenoiseFn fn = bind_inputs(joint, &w.imu, &w.keypoints, nullptr);
    RandomStream rng(mix_seed(seed, kCacheTag, static_cast<std::uint64_t>(i)));
    w.aux = sample_ddim(sched, fn, N, dim, sampling_steps, rng);
  }
}

Mat infer_window_positions(Denoiser& joint, const NoiseSchedule& sched, const Mat& imu,
                           const Mat& keypoints, int sampling_steps, std::uint64_t seed) {
  const DenoiseFn fn = bind_inputs(joint, &imu, &keypoints, nullptr);
  RandomStream rng(mix_seed(seed, kJointTag));
  return sample_ddim(sched, fn, joint.config().window, joint.config().target_dim,
                     sampling_steps, rng);
}

WindowEstimate infer_window(Denoiser& joint, Denoiser& pose, const NoiseSchedule& sched,
                            const Mat& imu, const Mat& keypoints, int sampling_steps,
                            std::uint64_t seed) {
  if (joint.config().window != pose.config().window)
    throw ShapeMismatch("infer_window: stages disagree on the window length");
  if (pose.config().aux_dim != joint.config().target_dim)
    throw ShapeMismatch("infer_window: pose stage expects stage-1 positions as aux input");

  WindowEstimate est;
  est.positions = infer_window_positions(joint, sched, imu, keypoints, sampling_steps, seed);

  const DenoiseFn fn = bind_inputs(pose, &imu, nullptr, &est.positions);
  RandomStream rng(mix_seed(seed, kPoseTag));
  est.rotations = sample_ddim(sched, fn, pose.config().window, pose.config().target_dim,
                              sampling_steps, rng);
  return est;
}

Mat infer_window_rotations_direct(Denoiser& direct, const NoiseSchedule& sched, const Mat& imu,
                                  const Mat& keypoints, int sampling_steps,
                                  std::uint64_t seed) {
  const DenoiseFn fn = bind_inputs(direct, &imu, &keypoints, nullptr);
  RandomStream rng(mix_seed(seed, kPoseTag));
  return sample_ddim(sched, fn, direct.config().window, direct.config().target_dim,
                     sampling_steps, rng);
}

}  // namespace mocap
