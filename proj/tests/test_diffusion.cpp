#include <doctest.h>

#include <cmath>

#include "mocap/diffusion.hpp"
#include "mocap/errors.hpp"

using namespace mocap;

namespace {

/// Denoiser that ignores its input and predicts a fixed target.
class FixedTarget : public TrainableDenoiser {
 public:
  explicit FixedTarget(Mat target) : target_(std::move(target)) {}
  Mat denoise(const Mat&, int) override { return target_; }
  void backward(const Mat&) override {}

 private:
  Mat target_;
};

}  // namespace

TEST_CASE("cosine schedule: closed-form anchors") {
  const NoiseSchedule s = NoiseSchedule::cosine(1000);
  CHECK(s.steps == 1000);
  CHECK(s.alpha_bar[1000] < 1e-3);
  CHECK(s.beta[1] < 1e-3);
  for (int t = 2; t <= 1000; ++t) CHECK(s.alpha_bar[t] < s.alpha_bar[t - 1]);
  // Product identity is bitwise by construction; validate() re-checks it.
  s.validate();
  CHECK_THROWS_AS(NoiseSchedule::cosine(1), InvalidSteps);
}

TEST_CASE("schedule: marginal-variance identity per step") {
  // alpha_t (1 - abar_{t-1}) + beta_t == 1 - abar_t: composing the per-step
  // kernel reproduces the closed-form marginal.
  const NoiseSchedule s = NoiseSchedule::cosine(500);
  for (int t = 1; t <= 500; ++t) {
    const double lhs = s.alpha[t] * (1.0 - s.alpha_bar[t - 1]) + s.beta[t];
    CHECK(std::abs(lhs - (1.0 - s.alpha_bar[t])) < 1e-12);
  }
}

TEST_CASE("forward_diffuse: affine form") {
  const NoiseSchedule s = NoiseSchedule::from_betas({0.36, 0.01});
  CHECK(s.alpha_bar[1] == doctest::Approx(0.64).epsilon(1e-15));

  Mat x0(1, 1), eps(1, 1);
  x0 << 1.0;
  eps << 1.0;
  CHECK(forward_diffuse(s, x0, 1, eps)(0, 0) == doctest::Approx(1.4).epsilon(1e-12));

  eps << 0.0;
  CHECK(forward_diffuse(s, x0, 1, eps)(0, 0) == doctest::Approx(0.8).epsilon(1e-12));

  x0 << 0.0;
  eps << 1.0;
  CHECK(forward_diffuse(s, x0, 1, eps)(0, 0) == doctest::Approx(0.6).epsilon(1e-12));

  Mat bad(2, 1);
  CHECK_THROWS_AS(forward_diffuse(s, x0, 1, bad), ShapeMismatch);
}

TEST_CASE("posterior_mean: t = 1 returns the prediction exactly") {
  const NoiseSchedule s = NoiseSchedule::from_betas({0.2, 0.01});
  Mat x_t(2, 3), x0(2, 3);
  x_t.setRandom();
  x0.setRandom();
  const Mat mu = posterior_mean(s, x_t, x0, 1);
  CHECK((mu - x0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("posterior_mean: hand-computed coefficients") {
  // beta = {0.2, 0.01}: alpha_2 = 0.99, abar_1 = 0.8, abar_2 = 0.792.
  const NoiseSchedule s = NoiseSchedule::from_betas({0.2, 0.01});
  CHECK(s.alpha_bar[2] == doctest::Approx(0.792).epsilon(1e-15));

  Mat x_t(1, 1), x0(1, 1);
  x_t << 1.0;
  x0 << 0.0;
  const double expect = std::sqrt(0.99) * 0.2 / 0.208;
  CHECK(posterior_mean(s, x_t, x0, 2)(0, 0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(posterior_mean(s, x_t, x0, 2)(0, 0) == doctest::Approx(0.9567).epsilon(1e-4));
}

TEST_CASE("ddpm_resample: final step is noiseless and deterministic") {
  const NoiseSchedule s = NoiseSchedule::from_betas({0.2, 0.01, 0.05});
  Mat x_t(2, 2), x0(2, 2);
  x_t.setRandom();
  x0.setRandom();

  RandomStream rng(10);
  const Mat out = ddpm_resample(s, x_t, x0, 1, rng);
  CHECK((out - posterior_mean(s, x_t, x0, 1)).cwiseAbs().maxCoeff() == 0.0);

  // Forced zero variance collapses onto the mean.
  NoiseSchedule z = s;
  z.posterior_var[2] = 0.0;
  RandomStream rng2(10);
  const Mat out2 = ddpm_resample(z, x_t, x0, 2, rng2);
  CHECK((out2 - posterior_mean(z, x_t, x0, 2)).cwiseAbs().maxCoeff() == 0.0);

  // Same seed, same draw.
  RandomStream ra(77), rb(77);
  const Mat a = ddpm_resample(s, x_t, x0, 3, ra);
  const Mat b = ddpm_resample(s, x_t, x0, 3, rb);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ddim_step: terminal step and exact noise recovery") {
  const NoiseSchedule s = NoiseSchedule::cosine(100);
  RandomStream rng(3);
  Mat x0(4, 5), eps(4, 5);
  rng.fill_normal(x0);
  rng.fill_normal(eps);

  const Mat x_50 = forward_diffuse(s, x0, 50, eps);

  // Terminal step returns the prediction bit-identically.
  CHECK((ddim_step(s, x_50, x0, 50, 0) - x0).cwiseAbs().maxCoeff() == 0.0);

  // With a perfect prediction the implied noise is the original eps, so a
  // jump to t_prev must land on the closed-form forward marginal.
  const Mat jumped = ddim_step(s, x_50, x0, 50, 20);
  const Mat expect = forward_diffuse(s, x0, 20, eps);
  CHECK((jumped - expect).cwiseAbs().maxCoeff() < 1e-9);

  CHECK_THROWS_AS(ddim_step(s, x_50, x0, 50, 50), InvalidStepPair);
  CHECK_THROWS_AS(ddim_step(s, x_50, x0, 50, 60), InvalidStepPair);
}

TEST_CASE("ddim_step_grid: uniform spacing with endpoints") {
  CHECK(ddim_step_grid(1000, 5) == std::vector<int>{1000, 800, 600, 400, 200, 0});
  CHECK(ddim_step_grid(1000, 1) == std::vector<int>{1000, 0});
  const auto full = ddim_step_grid(1000, 1000);
  CHECK(full.size() == 1001);
  CHECK(full.front() == 1000);
  CHECK(full.back() == 0);
}

TEST_CASE("sample_ddim: oracle denoiser is reproduced exactly for any step count") {
  const NoiseSchedule s = NoiseSchedule::cosine(1000);
  Mat target(3, 4);
  target.setRandom();
  const DenoiseFn oracle = [&](const Mat&, int) { return target; };

  for (int steps : {1, 5, 10, 1000}) {
    RandomStream rng(55);
    const Mat out = sample_ddim(s, oracle, 3, 4, steps, rng);
    CHECK((out - target).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("sample_ddim: same seed, bit-identical output") {
  const NoiseSchedule s = NoiseSchedule::cosine(200);
  const DenoiseFn shrink = [](const Mat& x, int) { return Mat(0.5 * x); };
  RandomStream ra(9), rb(9);
  const Mat a = sample_ddim(s, shrink, 2, 3, 5, ra);
  const Mat b = sample_ddim(s, shrink, 2, 3, 5, rb);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("marginal consistency: iterated kernel matches the closed form") {
  // Push a fixed scalar x0 through the one-step kernel T times and compare
  // the empirical mean/variance of x_T against Eq-1-style closed form.
  const NoiseSchedule s = NoiseSchedule::from_betas({0.05, 0.1, 0.15, 0.2, 0.25});
  const double x0 = 0.8;
  const int trials = 10000;
  RandomStream rng(1357);

  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < trials; ++i) {
    double x = x0;
    for (int t = 1; t <= s.steps; ++t)
      x = std::sqrt(s.alpha[t]) * x + std::sqrt(s.beta[t]) * rng.normal();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / trials;
  const double var = sumsq / trials - mean * mean;

  const double want_mean = std::sqrt(s.alpha_bar[5]) * x0;
  const double want_var = 1.0 - s.alpha_bar[5];
  // 3 standard errors.
  CHECK(std::abs(mean - want_mean) < 3.0 * std::sqrt(want_var / trials));
  CHECK(std::abs(var - want_var) < 3.0 * want_var * std::sqrt(2.0 / (trials - 1)));
}

TEST_CASE("training_loss: oracle denoisers give closed-form losses") {
  const NoiseSchedule s = NoiseSchedule::cosine(100);
  RandomStream rng(42);
  Mat x0(4, 6);
  rng.fill_normal(x0);

  FixedTarget perfect(x0);
  CHECK(training_loss(s, perfect, x0, rng) == 0.0);

  const double c = 0.37;
  FixedTarget offset(x0.array() + c);
  CHECK(training_loss(s, offset, x0, rng) == doctest::Approx(c * c).epsilon(1e-12));

  Mat nan_target = x0;
  nan_target(0, 0) = std::nan("");
  FixedTarget bad(nan_target);
  CHECK_THROWS_AS(training_loss(s, bad, x0, rng), NonFiniteLoss);
}
