#pragma once

#include <vector>

#include "mocap/params.hpp"

namespace mocap {

struct AdamWConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
};

/// Adam with decoupled weight decay. Moment buffers follow the parameter
/// registry order, so optimizer state serializes alongside the weights.
class AdamW {
 public:
  AdamW(ParamSet& params, const AdamWConfig& cfg);

  /// Applies one update from the accumulated gradients (does not zero them).
  void step();

  long steps_taken() const { return steps_; }
  void set_steps_taken(long steps) { steps_ = steps; }

  Mat& moment1(std::size_t i) { return m_[i]; }
  Mat& moment2(std::size_t i) { return v_[i]; }
  const Mat& moment1(std::size_t i) const { return m_[i]; }
  const Mat& moment2(std::size_t i) const { return v_[i]; }
  std::size_t size() const { return m_.size(); }

 private:
  ParamSet& params_;
  AdamWConfig cfg_;
  std::vector<Mat> m_, v_;
  long steps_ = 0;
};

}  // namespace mocap
