#include "mocap/optimizer.hpp"

#include <cmath>

namespace mocap {

AdamW::AdamW(ParamSet& params, const AdamWConfig& cfg) : params_(params), cfg_(cfg) {
  for (Param* p : params_.all()) {
    m_.push_back(Mat::Zero(p->w.rows(), p->w.cols()));
    v_.push_back(Mat::Zero(p->w.rows(), p->w.cols()));
  }
}

void AdamW::step() {
  ++steps_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
  const auto& params = params_.all();
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * p.g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * p.g.cwiseProduct(p.g);
    const Mat m_hat = m_[i] / bc1;
    const Mat v_hat = v_[i] / bc2;
    p.w -= cfg_.learning_rate *
           (m_hat.array() / (v_hat.array().sqrt() + cfg_.epsilon) + cfg_.weight_decay * p.w.array())
               .matrix();
  }
}

}  // namespace mocap
