#include "mocap/streaming.hpp"

#include <string>

#include "mocap/errors.hpp"

namespace mocap {

double latency_report(int slide, double fps) {
  if (slide < 1) throw InvalidConfig("latency_report: slide must be >= 1");
  if (!(fps > 0.0)) throw InvalidConfig("latency_report: fps must be positive");
  return static_cast<double>(slide) / fps;
}

double blend_weight(int pos, int window, int slide, bool first_window) {
  double w = 1.0;
  if (!first_window && pos < slide)
    w = std::min(w, static_cast<double>(pos) / slide);
  if (pos >= window - slide)
    w = std::min(w, static_cast<double>(window - pos) / slide);
  return w;
}

StreamingInference::StreamingInference(WindowInferFn infer, int window, int slide, int imu_dim,
                                       int keypoint_dim, int pos_dim, int rot_dim)
    : infer_(std::move(infer)),
      window_(window),
      slide_(slide),
      imu_dim_(imu_dim),
      keypoint_dim_(keypoint_dim),
      pos_dim_(pos_dim),
      rot_dim_(rot_dim) {
  if (window_ < 1 || slide_ < 1 || slide_ > window_)
    throw InvalidConfig("streaming: need 1 <= slide <= window");
}

void StreamingInference::run_window(long start, bool first_window) {
  Mat imu(window_, imu_dim_), kp(window_, keypoint_dim_);
  for (int q = 0; q < window_; ++q) {
    const std::size_t at = static_cast<std::size_t>(start + q - buffer_base_);
    imu.row(q) = imu_buffer_[at].transpose();
    kp.row(q) = keypoint_buffer_[at].transpose();
  }
  const auto [pos, rot] = infer_(imu, kp, start);
  if (pos.rows() != window_ || pos.cols() != pos_dim_ || rot.rows() != window_ ||
      rot.cols() != rot_dim_)
    throw ShapeMismatch("streaming: window inference returned the wrong shape");

  for (int q = 0; q < window_; ++q) {
    const double w = blend_weight(q, window_, slide_, first_window);
    if (w <= 0.0) continue;
    const long frame = start + q;
    Accumulator& acc = acc_[static_cast<std::size_t>(frame - emitted_)];
    const Vec vp = pos.row(q).transpose();
    const Vec vr = rot.row(q).transpose();
    if (!acc.has_base) {
      acc.has_base = true;
      acc.base_pos = vp;
      acc.base_rot = vr;
      acc.dev_pos = Vec::Zero(pos_dim_);
      acc.dev_rot = Vec::Zero(rot_dim_);
    }
    acc.dev_pos += w * (vp - acc.base_pos);
    acc.dev_rot += w * (vr - acc.base_rot);
    acc.weight += w;
  }
}

std::vector<StreamFrame> StreamingInference::emit_up_to(long bound) {
  std::vector<StreamFrame> out;
  while (emitted_ < bound) {
    Accumulator& acc = acc_.front();
    if (!acc.has_base || acc.weight <= 0.0)
      throw Error("streaming: frame " + std::to_string(emitted_) +
                  " has no positive blend weight");
    StreamFrame f;
    f.index = emitted_;
    f.positions = acc.base_pos + acc.dev_pos / acc.weight;
    f.rotations = acc.base_rot + acc.dev_rot / acc.weight;
    last_weight_sum_ = acc.weight;
    out.push_back(std::move(f));
    acc_.pop_front();
    ++emitted_;
  }
  return out;
}

std::vector<StreamFrame> StreamingInference::push(long frame_index, const Vec& imu,
                                                  const Vec& keypoints) {
  if (frame_index != received_)
    throw OutOfOrderFrame("streaming: expected frame " + std::to_string(received_) + ", got " +
                          std::to_string(frame_index));
  if (imu.size() != imu_dim_ || keypoints.size() != keypoint_dim_)
    throw ShapeMismatch("streaming: frame channel counts do not match the stream");

  imu_buffer_.push_back(imu);
  keypoint_buffer_.push_back(keypoints);
  ++received_;
  acc_.push_back(Accumulator{});

  std::vector<StreamFrame> out;
  while (received_ >= next_start_ + window_) {
    const long start = next_start_;
    run_window(start, start == 0);
    next_start_ += slide_;
    // A later flush window begins strictly after `start`, so frames up to
    // and including it are settled; anything beyond could still receive a
    // contribution from the end-aligned tail window.
    auto emitted = emit_up_to(start + 1);
    out.insert(out.end(), std::make_move_iterator(emitted.begin()),
               std::make_move_iterator(emitted.end()));
    // Keep what the next scheduled window or a flush-now window would read;
    // the buffer stays within window + slide frames.
    const long trim = std::min(next_start_, std::max<long>(0, received_ - window_));
    while (buffer_base_ < trim) {
      imu_buffer_.pop_front();
      keypoint_buffer_.pop_front();
      ++buffer_base_;
    }
  }
  return out;
}

std::vector<StreamFrame> StreamingInference::flush() {
  if (received_ == 0) return {};
  if (received_ < window_)
    throw TooShortSequence("streaming: " + std::to_string(received_) +
                           " frames cannot fill a " + std::to_string(window_) +
                           "-frame window");
  const long last_run_end = next_start_ - slide_ + window_;
  if (last_run_end < received_) {
    const long start = received_ - window_;
    run_window(start, start == 0);
  }
  return emit_up_to(received_);
}

std::pair<Mat, Mat> offline_sliding_inference(const Mat& imu, const Mat& keypoints,
                                              const WindowInferFn& infer, int window,
                                              int slide, int pos_dim, int rot_dim) {
  const long frames = imu.rows();
  if (keypoints.rows() != frames)
    throw ShapeMismatch("offline inference: imu and keypoints disagree on frame count");
  if (frames < window)
    throw TooShortSequence("offline inference: sequence shorter than one window");
  if (slide < 1 || slide > window) throw InvalidConfig("offline inference: bad slide");

  std::vector<long> starts;
  for (long s = 0; s + window <= frames; s += slide) starts.push_back(s);
  if (starts.back() + window < frames) starts.push_back(frames - window);

  Mat base_pos = Mat::Zero(frames, pos_dim), dev_pos = Mat::Zero(frames, pos_dim);
  Mat base_rot = Mat::Zero(frames, rot_dim), dev_rot = Mat::Zero(frames, rot_dim);
  Vec weight = Vec::Zero(frames);
  std::vector<bool> has_base(static_cast<std::size_t>(frames), false);

  for (const long start : starts) {
    const auto [pos, rot] = infer(imu.middleRows(start, window),
                                  keypoints.middleRows(start, window), start);
    if (pos.rows() != window || pos.cols() != pos_dim || rot.rows() != window ||
        rot.cols() != rot_dim)
      throw ShapeMismatch("offline inference: window inference returned the wrong shape");
    for (int q = 0; q < window; ++q) {
      const double w = blend_weight(q, window, slide, start == 0);
      if (w <= 0.0) continue;
      const long f = start + q;
      if (!has_base[static_cast<std::size_t>(f)]) {
        has_base[static_cast<std::size_t>(f)] = true;
        base_pos.row(f) = pos.row(q);
        base_rot.row(f) = rot.row(q);
      }
      dev_pos.row(f) += w * (pos.row(q) - base_pos.row(f));
      dev_rot.row(f) += w * (rot.row(q) - base_rot.row(f));
      weight(f) += w;
    }
  }

  Mat out_pos(frames, pos_dim), out_rot(frames, rot_dim);
  for (long f = 0; f < frames; ++f) {
    if (!(weight(f) > 0.0))
      throw Error("offline inference: frame " + std::to_string(f) + " got no blend weight");
    out_pos.row(f) = base_pos.row(f) + dev_pos.row(f) / weight(f);
    out_rot.row(f) = base_rot.row(f) + dev_rot.row(f) / weight(f);
  }
  return {out_pos, out_rot};
}

}  // namespace mocap
