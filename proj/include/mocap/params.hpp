#pragma once

#include <deque>
#include <string>
#include <vector>

#include "mocap/skeleton.hpp"

namespace mocap {

/// One learned tensor with its gradient accumulator.
struct Param {
  std::string name;
  Mat w;
  Mat g;
};

/// Ordered registry of learned tensors. Creation order is fixed by the
/// model constructor, which makes initialization, optimizer state, and
/// checkpoints deterministic.
class ParamSet {
 public:
  Param& add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    params_.push_back(Param{name, Mat::Zero(rows, cols), Mat::Zero(rows, cols)});
    order_.push_back(&params_.back());
    return params_.back();
  }

  const std::vector<Param*>& all() { return order_; }
  std::vector<const Param*> all() const {
    return std::vector<const Param*>(order_.begin(), order_.end());
  }

  Param* find(const std::string& name) {
    for (Param* p : order_)
      if (p->name == name) return p;
    return nullptr;
  }

  long total_size() const {
    long n = 0;
    for (const Param* p : order_) n += static_cast<long>(p->w.size());
    return n;
  }

  void zero_grads() {
    for (Param* p : order_) p->g.setZero();
  }

 private:
  std::deque<Param> params_;  // deque keeps addresses stable
  std::vector<Param*> order_;
};

}  // namespace mocap
