#include "mocap/dataset.hpp"

#include <cmath>

#include "mocap/errors.hpp"
#include "mocap/sensors.hpp"

namespace mocap {

WindowDataset slice_windows(const std::vector<SequenceContainer>& sequences, int window,
                            int stride) {
  if (window < 1 || stride < 1) throw InvalidConfig("slice_windows: window and stride >= 1");
  if (sequences.empty()) throw InvalidConfig("slice_windows: empty sequence set");

  WindowDataset ds;
  ds.window = window;
  ds.joints = sequences.front().joints;
  ds.keypoint_count = sequences.front().keypoint_count;

  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const SequenceContainer& seq = sequences[s];
    if (seq.joints != ds.joints || seq.keypoint_count != ds.keypoint_count)
      throw ShapeMismatch("slice_windows: sequences disagree on joint/keypoint counts");
    if (seq.rotations.size() == 0 || seq.positions.size() == 0 || seq.imu.size() == 0 ||
        seq.keypoints.size() == 0)
      throw FormatError("slice_windows: sequence " + std::to_string(s) +
                        " is missing one of rotations/positions/imu/keypoints");
    for (int start = 0; start + window <= seq.frames; start += stride) {
      Window w;
      w.positions = seq.positions.middleRows(start, window);
      w.rotations = seq.rotations.middleRows(start, window);
      w.imu = seq.imu.middleRows(start, window);
      w.keypoints = seq.keypoints.middleRows(start, window);
      w.source_sequence = static_cast<int>(s);
      w.start_frame = start;
      ds.windows.push_back(std::move(w));
    }
  }
  if (ds.windows.empty())
    throw InvalidConfig("slice_windows: no sequence is long enough for the window");
  return ds;
}

DenoiserInputs window_inputs(const Window& w, const DenoiserConfig& cfg) {
  DenoiserInputs in;
  if (cfg.imu_dim > 0) in.imu = &w.imu;
  if (cfg.keypoint_dim > 0) in.keypoints = &w.keypoints;
  if (cfg.aux_dim > 0) in.aux = &w.aux;
  return in;
}

const Mat& window_target(const Window& w, TargetKind kind) {
  return kind == TargetKind::kPositions ? w.positions : w.rotations;
}

namespace {

void accumulate(const Mat& m, Vec& sum, Vec& sumsq, long& rows) {
  sum += m.colwise().sum().transpose();
  sumsq += m.cwiseProduct(m).colwise().sum().transpose();
  rows += m.rows();
}

void finalize(Vec& sum, Vec& sumsq, long rows, Vec& mean, Vec& stddev) {
  mean = sum / static_cast<double>(rows);
  Vec var = sumsq / static_cast<double>(rows) - mean.cwiseProduct(mean);
  stddev = var.cwiseMax(0.0).cwiseSqrt().cwiseMax(1e-6);
}

}  // namespace

NormStats compute_norm_stats(const DenoiserConfig& cfg, const WindowDataset& data) {
  NormStats stats = NormStats::identity(cfg);
  if (data.windows.empty()) return stats;

  if (cfg.imu_dim > 0) {
    Vec sum = Vec::Zero(cfg.imu_dim), sumsq = Vec::Zero(cfg.imu_dim);
    long rows = 0;
    for (const Window& w : data.windows) accumulate(w.imu, sum, sumsq, rows);
    finalize(sum, sumsq, rows, stats.imu_mean, stats.imu_std);
  }
  if (cfg.keypoint_dim > 0) {
    Vec sum = Vec::Zero(cfg.keypoint_dim), sumsq = Vec::Zero(cfg.keypoint_dim);
    long rows = 0;
    for (const Window& w : data.windows) accumulate(w.keypoints, sum, sumsq, rows);
    finalize(sum, sumsq, rows, stats.keypoint_mean, stats.keypoint_std);
  }
  if (cfg.aux_dim > 0) {
    Vec sum = Vec::Zero(cfg.aux_dim), sumsq = Vec::Zero(cfg.aux_dim);
    long rows = 0;
    for (const Window& w : data.windows) {
      if (w.aux.size() == 0)
        throw ShapeMismatch("compute_norm_stats: window lacks the aux tensor");
      accumulate(w.aux, sum, sumsq, rows);
    }
    finalize(sum, sumsq, rows, stats.aux_mean, stats.aux_std);
  }
  return stats;
}

}  // namespace mocap
