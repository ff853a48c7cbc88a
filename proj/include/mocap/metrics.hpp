#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mocap/skeleton.hpp"

namespace mocap {

/// Mean per-joint position error in millimeters. Both inputs are N x 3J in
/// meters; each frame is root-aligned first (the root joint is subtracted
/// from every joint), matching the root-relative target convention. The
/// root itself is excluded from the average, as alignment zeroes its error.
double mpjpe_mm(const Mat& pred, const Mat& gt, int root_joint = 0);

/// Optimal similarity transform (rotation, translation, uniform scale)
/// mapping the J x 3 point set onto the reference in the least-squares
/// sense, applied to the points. Throws DegenerateConfiguration when either
/// point set is collinear within 1e-9.
Mat similarity_align(const Mat& points, const Mat& reference);

/// Procrustes-aligned MPJPE in millimeters: per frame, pred is aligned to gt
/// by the optimal similarity transform before measuring. Alignment uses all
/// joints; the average skips the root, matching mpjpe_mm.
double pa_mpjpe_mm(const Mat& pred, const Mat& gt, int root_joint = 0);

struct EvalFingerprint {
  std::string mode;        // conditioning mode or "regressor"
  std::string dataset_id;
  int sampling_steps = 5;
  double sigma = 0.0;
  int slide = 30;
};

struct SequenceMetrics {
  std::string name;
  int frames = 0;
  double mpjpe_mm = 0.0;
  double pa_mpjpe_mm = 0.0;
};

struct MetricReport {
  double mpjpe_mm = 0.0;
  double pa_mpjpe_mm = 0.0;
  double latency_s = 0.0;
  std::vector<SequenceMetrics> per_sequence;
  EvalFingerprint fingerprint;
  std::uint64_t seed = 0;
};

/// Frame-weighted aggregation of per-sequence metrics.
MetricReport aggregate_report(std::vector<SequenceMetrics> rows, EvalFingerprint fingerprint,
                              std::uint64_t seed);

}  // namespace mocap
