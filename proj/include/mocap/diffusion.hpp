#pragma once

#include <functional>
#include <vector>

#include "mocap/random.hpp"
#include "mocap/skeleton.hpp"

namespace mocap {

/// Noise schedule tables, 1-indexed by timestep: entry [t] holds the value
/// for step t in [1, T]; entry [0] carries the alpha_bar_0 := 1 convention.
/// alpha_bar is built as the running product of alpha, so the product
/// identity holds bitwise.
struct NoiseSchedule {
  int steps = 0;  // T
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;
  std::vector<double> posterior_var;

  /// Squared-cosine schedule with offset s = 0.008 and betas clipped at
  /// 0.999. Throws InvalidSteps if T < 2.
  static NoiseSchedule cosine(int T);

  /// Builds the derived tables from explicit betas (betas[i] is step i+1).
  static NoiseSchedule from_betas(const std::vector<double>& betas);

  void validate() const;
};

/// Which variance the DDPM resampling step uses.
enum class ResampleVariance { kPosterior, kBeta };

/// x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps.
Mat forward_diffuse(const NoiseSchedule& sched, const Mat& x0, int t, const Mat& eps);

/// Posterior mean of x_{t-1} given (x_t, predicted x0). Exactly x0_hat at
/// t = 1.
Mat posterior_mean(const NoiseSchedule& sched, const Mat& x_t, const Mat& x0_hat, int t);

/// One stochastic reverse step; the final step (t = 1) adds no noise.
Mat ddpm_resample(const NoiseSchedule& sched, const Mat& x_t, const Mat& x0_hat, int t,
                  RandomStream& rng, ResampleVariance variance = ResampleVariance::kPosterior);

/// Deterministic (eta = 0) accelerated step from t down to t_prev < t;
/// t_prev = 0 returns x0_hat exactly.
Mat ddim_step(const NoiseSchedule& sched, const Mat& x_t, const Mat& x0_hat, int t, int t_prev);

/// Denoiser under fixed conditions: predicts x0 from (x_t, t).
using DenoiseFn = std::function<Mat(const Mat& x_t, int t)>;

/// S+1 uniformly spaced step indices from T down to 0, endpoints included.
std::vector<int> ddim_step_grid(int T, int S);

/// Draws x_T ~ N(0, I) and runs S deterministic steps down the grid. The
/// result is the final x0 prediction.
Mat sample_ddim(const NoiseSchedule& sched, const DenoiseFn& denoise, int rows, int cols,
                int steps, RandomStream& rng);

/// Denoiser that can also backpropagate: backward() accumulates parameter
/// gradients for the most recent denoise() call.
class TrainableDenoiser {
 public:
  virtual ~TrainableDenoiser() = default;
  virtual Mat denoise(const Mat& x_t, int t) = 0;
  virtual void backward(const Mat& grad_out) = 0;
};

/// MSE between the x0 prediction at a fixed (t, eps) and the clean target;
/// optionally backpropagates. This is the deterministic core used both by
/// training and by finite-difference checks.
double training_loss_at(const NoiseSchedule& sched, TrainableDenoiser& denoiser, const Mat& x0,
                        int t, const Mat& eps, bool do_backward);

/// Samples t uniform in [1, T] and eps ~ N(0, I), then runs
/// training_loss_at with backpropagation. Throws NonFiniteLoss on NaN/Inf.
double training_loss(const NoiseSchedule& sched, TrainableDenoiser& denoiser, const Mat& x0,
                     RandomStream& rng);

}  // namespace mocap
