#include "mocap/metrics.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "mocap/errors.hpp"

namespace mocap {

namespace {

void check_point_shapes(const Mat& pred, const Mat& gt) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols())
    throw ShapeMismatch("metrics: pred " + std::to_string(pred.rows()) + "x" +
                        std::to_string(pred.cols()) + " vs gt " + std::to_string(gt.rows()) +
                        "x" + std::to_string(gt.cols()));
  if (pred.cols() % 3 != 0) throw ShapeMismatch("metrics: columns must be a multiple of 3");
}

Mat frame_points(const Mat& seq, int frame) {
  const int joints = static_cast<int>(seq.cols()) / 3;
  Mat pts(joints, 3);
  for (int j = 0; j < joints; ++j) pts.row(j) = seq.block<1, 3>(frame, 3 * j);
  return pts;
}

// Mean distance over the non-root joints. The root is excluded from both
// metrics: after root alignment its error is identically zero, so including
// it would only dilute the average.
double mean_distance_nonroot(const Mat& a, const Mat& b, int root_joint) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    if (j == root_joint) continue;
    sum += (a.row(j) - b.row(j)).norm();
  }
  return sum / static_cast<double>(a.rows() - 1);
}

void check_not_collinear(const Mat& centered, const char* which) {
  const Eigen::JacobiSVD<Mat> svd(centered);
  if (svd.singularValues().size() < 2 || svd.singularValues()(1) < 1e-9)
    throw DegenerateConfiguration(std::string("pa_mpjpe: ") + which +
                                  " joints are collinear; alignment is not unique");
}

}  // namespace

double mpjpe_mm(const Mat& pred, const Mat& gt, int root_joint) {
  check_point_shapes(pred, gt);
  const int joints = static_cast<int>(pred.cols()) / 3;
  if (joints < 2) throw ShapeMismatch("mpjpe: need at least 2 joints");
  if (root_joint < 0 || root_joint >= joints)
    throw ShapeMismatch("mpjpe: root joint out of range");
  double sum = 0.0;
  for (Eigen::Index n = 0; n < pred.rows(); ++n) {
    const Eigen::RowVector3d pr = pred.block<1, 3>(n, 3 * root_joint);
    const Eigen::RowVector3d gr = gt.block<1, 3>(n, 3 * root_joint);
    for (int j = 0; j < joints; ++j) {
      if (j == root_joint) continue;
      const Eigen::RowVector3d d =
          (pred.block<1, 3>(n, 3 * j) - pr) - (gt.block<1, 3>(n, 3 * j) - gr);
      sum += d.norm();
    }
  }
  return sum / static_cast<double>(pred.rows() * (joints - 1)) * 1000.0;
}

Mat similarity_align(const Mat& points, const Mat& reference) {
  if (points.rows() != reference.rows() || points.cols() != 3 || reference.cols() != 3)
    throw ShapeMismatch("similarity_align: point sets must both be J x 3");
  const Eigen::Index n = points.rows();
  if (n < 3) throw DegenerateConfiguration("similarity_align: need at least 3 points");

  const Eigen::RowVector3d mu_p = points.colwise().mean();
  const Eigen::RowVector3d mu_r = reference.colwise().mean();
  const Mat pc = points.rowwise() - mu_p;
  const Mat rc = reference.rowwise() - mu_r;
  check_not_collinear(pc, "predicted");
  check_not_collinear(rc, "reference");

  const Mat3 cov = rc.transpose() * pc / static_cast<double>(n);
  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 sign = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) sign(2, 2) = -1.0;
  const Mat3 rot = svd.matrixU() * sign * svd.matrixV().transpose();
  const double var_p = pc.squaredNorm() / static_cast<double>(n);
  const double scale = (svd.singularValues().asDiagonal() * sign).trace() / var_p;

  Mat aligned = scale * (rot * pc.transpose()).transpose();
  aligned.rowwise() += mu_r;
  return aligned;
}

double pa_mpjpe_mm(const Mat& pred, const Mat& gt, int root_joint) {
  check_point_shapes(pred, gt);
  const int joints = static_cast<int>(pred.cols()) / 3;
  if (joints < 3) throw DegenerateConfiguration("pa_mpjpe: need at least 3 joints");
  if (root_joint < 0 || root_joint >= joints)
    throw ShapeMismatch("pa_mpjpe: root joint out of range");
  double sum = 0.0;
  for (Eigen::Index n = 0; n < pred.rows(); ++n) {
    const Mat p = frame_points(pred, static_cast<int>(n));
    const Mat g = frame_points(gt, static_cast<int>(n));
    sum += mean_distance_nonroot(similarity_align(p, g), g, root_joint);
  }
  return sum / static_cast<double>(pred.rows()) * 1000.0;
}

MetricReport aggregate_report(std::vector<SequenceMetrics> rows, EvalFingerprint fingerprint,
                              std::uint64_t seed) {
  MetricReport report;
  report.fingerprint = std::move(fingerprint);
  report.seed = seed;
  long total = 0;
  for (const SequenceMetrics& r : rows) {
    report.mpjpe_mm += r.mpjpe_mm * r.frames;
    report.pa_mpjpe_mm += r.pa_mpjpe_mm * r.frames;
    total += r.frames;
  }
  if (total > 0) {
    report.mpjpe_mm /= static_cast<double>(total);
    report.pa_mpjpe_mm /= static_cast<double>(total);
  }
  report.per_sequence = std::move(rows);
  return report;
}

}  // namespace mocap
