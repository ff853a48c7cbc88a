#include "mocap/diffusion.hpp"

#include <cmath>
#include <string>

#include "mocap/errors.hpp"

namespace mocap {

namespace {

void check_step(const NoiseSchedule& sched, int t) {
  if (t < 1 || t > sched.steps)
    throw InvalidSteps("timestep " + std::to_string(t) + " outside [1," +
                       std::to_string(sched.steps) + "]");
}

void check_same_shape(const Mat& a, const Mat& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeMismatch(std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
}

}  // namespace

NoiseSchedule NoiseSchedule::from_betas(const std::vector<double>& betas) {
  const int T = static_cast<int>(betas.size());
  if (T < 2) throw InvalidSteps("schedule needs at least 2 steps");
  NoiseSchedule s;
  s.steps = T;
  s.beta.assign(static_cast<std::size_t>(T) + 1, 0.0);
  s.alpha.assign(static_cast<std::size_t>(T) + 1, 1.0);
  s.alpha_bar.assign(static_cast<std::size_t>(T) + 1, 1.0);
  s.posterior_var.assign(static_cast<std::size_t>(T) + 1, 0.0);
  for (int t = 1; t <= T; ++t) {
    const double b = betas[static_cast<std::size_t>(t) - 1];
    if (!(b > 0.0) || b > 0.999)
      throw InvalidConfig("beta_" + std::to_string(t) + " = " + std::to_string(b) +
                          " outside (0, 0.999]");
    s.beta[static_cast<std::size_t>(t)] = b;
    s.alpha[static_cast<std::size_t>(t)] = 1.0 - b;
    s.alpha_bar[static_cast<std::size_t>(t)] =
        s.alpha_bar[static_cast<std::size_t>(t) - 1] * s.alpha[static_cast<std::size_t>(t)];
    // (1 - abar_{t-1}) / (1 - abar_t) * beta_t; zero at t = 1 by the
    // abar_0 := 1 convention.
    s.posterior_var[static_cast<std::size_t>(t)] =
        (1.0 - s.alpha_bar[static_cast<std::size_t>(t) - 1]) /
        (1.0 - s.alpha_bar[static_cast<std::size_t>(t)]) * b;
  }
  s.validate();
  return s;
}

NoiseSchedule NoiseSchedule::cosine(int T) {
  if (T < 2) throw InvalidSteps("cosine schedule needs T >= 2");
  const double s = 0.008;
  auto f = [&](int t) {
    const double u = ((static_cast<double>(t) / T) + s) / (1.0 + s) * (M_PI / 2.0);
    const double c = std::cos(u);
    return c * c;
  };
  std::vector<double> betas(static_cast<std::size_t>(T));
  double prev = f(0);
  for (int t = 1; t <= T; ++t) {
    const double cur = f(t);
    betas[static_cast<std::size_t>(t) - 1] = std::min(1.0 - cur / prev, 0.999);
    prev = cur;
  }
  return from_betas(betas);
}

void NoiseSchedule::validate() const {
  if (steps < 2) throw InvalidSteps("schedule needs at least 2 steps");
  if (alpha_bar[0] != 1.0) throw InvalidConfig("alpha_bar[0] must be exactly 1");
  for (int t = 1; t <= steps; ++t) {
    const auto i = static_cast<std::size_t>(t);
    if (!(beta[i] > 0.0) || beta[i] > 0.999)
      throw InvalidConfig("beta_" + std::to_string(t) + " outside (0, 0.999]");
    if (alpha_bar[i] != alpha_bar[i - 1] * alpha[i])
      throw InvalidConfig("alpha_bar is not the exact running product at t = " +
                          std::to_string(t));
    if (!(alpha_bar[i] < alpha_bar[i - 1]))
      throw InvalidConfig("alpha_bar not strictly decreasing at t = " + std::to_string(t));
  }
}

Mat forward_diffuse(const NoiseSchedule& sched, const Mat& x0, int t, const Mat& eps) {
  check_step(sched, t);
  check_same_shape(x0, eps, "forward_diffuse");
  const double abar = sched.alpha_bar[static_cast<std::size_t>(t)];
  return std::sqrt(abar) * x0 + std::sqrt(1.0 - abar) * eps;
}

Mat posterior_mean(const NoiseSchedule& sched, const Mat& x_t, const Mat& x0_hat, int t) {
  check_step(sched, t);
  check_same_shape(x_t, x0_hat, "posterior_mean");
  if (t == 1) return x0_hat;  // the x_t coefficient vanishes with abar_0 = 1
  const auto i = static_cast<std::size_t>(t);
  const double abar = sched.alpha_bar[i];
  const double abar_prev = sched.alpha_bar[i - 1];
  const double c_xt = std::sqrt(sched.alpha[i]) * (1.0 - abar_prev) / (1.0 - abar);
  const double c_x0 = std::sqrt(abar_prev) * sched.beta[i] / (1.0 - abar);
  return c_xt * x_t + c_x0 * x0_hat;
}

Mat ddpm_resample(const NoiseSchedule& sched, const Mat& x_t, const Mat& x0_hat, int t,
                  RandomStream& rng, ResampleVariance variance) {
  Mat mu = posterior_mean(sched, x_t, x0_hat, t);
  if (t == 1) return mu;  // final step is noiseless
  const auto i = static_cast<std::size_t>(t);
  const double var =
      variance == ResampleVariance::kPosterior ? sched.posterior_var[i] : sched.beta[i];
  const double sigma = std::sqrt(var);
  Mat z(mu.rows(), mu.cols());
  rng.fill_normal(z);
  return mu + sigma * z;
}

Mat ddim_step(const NoiseSchedule& sched, const Mat& x_t, const Mat& x0_hat, int t,
              int t_prev) {
  check_step(sched, t);
  if (t_prev < 0 || t_prev >= t)
    throw InvalidStepPair("ddim_step: need 0 <= t_prev < t, got t_prev = " +
                          std::to_string(t_prev) + ", t = " + std::to_string(t));
  check_same_shape(x_t, x0_hat, "ddim_step");
  if (t_prev == 0) return x0_hat;
  const double abar_t = sched.alpha_bar[static_cast<std::size_t>(t)];
  const double abar_prev = sched.alpha_bar[static_cast<std::size_t>(t_prev)];
  const Mat eps_hat = (x_t - std::sqrt(abar_t) * x0_hat) / std::sqrt(1.0 - abar_t);
  return std::sqrt(abar_prev) * x0_hat + std::sqrt(1.0 - abar_prev) * eps_hat;
}

std::vector<int> ddim_step_grid(int T, int S) {
  if (S < 1) throw InvalidSteps("sampling needs at least 1 step");
  std::vector<int> grid;
  grid.reserve(static_cast<std::size_t>(S) + 1);
  for (int i = 0; i <= S; ++i) {
    const int tau =
        static_cast<int>(std::llround(static_cast<double>(T) * (S - i) / static_cast<double>(S)));
    if (!grid.empty() && tau >= grid.back()) continue;  // collapse duplicates when S > T
    grid.push_back(tau);
  }
  return grid;
}

Mat sample_ddim(const NoiseSchedule& sched, const DenoiseFn& denoise, int rows, int cols,
                int steps, RandomStream& rng) {
  const std::vector<int> grid = ddim_step_grid(sched.steps, steps);
  Mat x(rows, cols);
  rng.fill_normal(x);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const Mat x0_hat = denoise(x, grid[i]);
    x = ddim_step(sched, x, x0_hat, grid[i], grid[i + 1]);
  }
  return x;
}

double training_loss_at(const NoiseSchedule& sched, TrainableDenoiser& denoiser, const Mat& x0,
                        int t, const Mat& eps, bool do_backward) {
  const Mat x_t = forward_diffuse(sched, x0, t, eps);
  const Mat pred = denoiser.denoise(x_t, t);
  check_same_shape(pred, x0, "training_loss");
  const Mat diff = pred - x0;
  const double count = static_cast<double>(diff.size());
  const double loss = diff.squaredNorm() / count;
  if (do_backward) denoiser.backward((2.0 / count) * diff);
  return loss;
}

double training_loss(const NoiseSchedule& sched, TrainableDenoiser& denoiser, const Mat& x0,
                     RandomStream& rng) {
  if (!x0.allFinite()) throw NonFiniteLoss("training_loss: non-finite target");
  const int t = static_cast<int>(rng.uniform_int(1, sched.steps));
  Mat eps(x0.rows(), x0.cols());
  rng.fill_normal(eps);
  const double loss = training_loss_at(sched, denoiser, x0, t, eps, /*do_backward=*/true);
  if (!std::isfinite(loss))
    throw NonFiniteLoss("training_loss: loss is not finite at t = " + std::to_string(t));
  return loss;
}

}  // namespace mocap
