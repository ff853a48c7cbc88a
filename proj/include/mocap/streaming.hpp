#pragma once

#include <deque>
#include <functional>
#include <utility>
#include <vector>

#include "mocap/skeleton.hpp"

namespace mocap {

/// Algorithmic delay of live emission: a fresh frame waits at most one
/// window slide for its first estimate, so the lookahead is `slide` frames.
/// Later windows refine a frame but the live path does not wait for them.
double latency_report(int slide, double fps);

/// Runs inference on one full window; `start_frame` lets the callee derive a
/// deterministic per-window seed. Returns (positions N x Dp, rotations N x Dr).
using WindowInferFn =
    std::function<std::pair<Mat, Mat>(const Mat& imu, const Mat& keypoints, long start_frame)>;

struct StreamFrame {
  long index = 0;
  Vec positions;  // Dp
  Vec rotations;  // Dr
};

/// Triangular cross-fade weight of position `pos` inside a window: rising
/// pos/slide over the first `slide` frames (suppressed for the stream's
/// first window, which has no predecessor to fade from), falling
/// (window-pos)/slide over the last `slide`, 1 between. For slide = N/2 the
/// two-window overlap weights are exactly the linear 1->0 / 0->1 ramps.
double blend_weight(int pos, int window, int slide, bool first_window);

/// Online sliding-window inference. Frames enter one at a time; whenever a
/// scheduled window completes it runs the model and folds its output into
/// per-frame weighted accumulators; a frame is emitted once no future window
/// can touch it. flush() handles the ragged tail by running one final
/// end-aligned window, then drains the accumulators. The weighted average is
/// kept in deviation form (base value + weighted offsets), so frames on
/// which every window agrees are reproduced bit-exactly.
class StreamingInference {
 public:
  StreamingInference(WindowInferFn infer, int window, int slide, int imu_dim, int keypoint_dim,
                     int pos_dim, int rot_dim);

  /// frame_index must be the number of frames already pushed.
  std::vector<StreamFrame> push(long frame_index, const Vec& imu, const Vec& keypoints);
  std::vector<StreamFrame> flush();

  long frames_received() const { return received_; }
  long frames_emitted() const { return emitted_; }
  /// Sum of normalized blend weights of the last emitted frame (diagnostic).
  double last_weight_sum() const { return last_weight_sum_; }

 private:
  struct Accumulator {
    bool has_base = false;
    Vec base_pos, base_rot;   // first contributing window's value
    Vec dev_pos, dev_rot;     // sum of w * (value - base)
    double weight = 0.0;
  };

  void run_window(long start, bool first_window);
  std::vector<StreamFrame> emit_up_to(long bound);

  WindowInferFn infer_;
  int window_, slide_, imu_dim_, keypoint_dim_, pos_dim_, rot_dim_;
  long received_ = 0;
  long emitted_ = 0;
  long next_start_ = 0;   // next scheduled window start
  long buffer_base_ = 0;  // stream index of buffer_.front()
  std::deque<Vec> imu_buffer_, keypoint_buffer_;
  std::deque<Accumulator> acc_;  // acc_[i] belongs to frame emitted_ + i
  double last_weight_sum_ = 1.0;
};

/// Offline counterpart: the same window schedule, weights, and accumulation
/// order over in-memory sequences. Bit-identical to streaming the frames
/// through StreamingInference and flushing.
std::pair<Mat, Mat> offline_sliding_inference(const Mat& imu, const Mat& keypoints,
                                              const WindowInferFn& infer, int window,
                                              int slide, int pos_dim, int rot_dim);

}  // namespace mocap
