#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>

#include "mocap/errors.hpp"
#include "mocap/metrics.hpp"
#include "oracles.hpp"

using namespace mocap;

namespace {

constexpr int kJoints = 24;

Mat random_pose_rows(RandomStream& rng, int frames) {
  Mat m(frames, 3 * kJoints);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (int j = 0; j < kJoints; ++j)
      for (int c = 0; c < 3; ++c) m(r, 3 * j + c) = rng.normal(0.0, 0.25);
    m.block<1, 3>(r, 0).setZero();  // root-relative convention
  }
  return m;
}

Mat apply_similarity(const Mat& seq, const Mat3& R, const Vec3& t, double scale) {
  Mat out = seq;
  for (Eigen::Index r = 0; r < seq.rows(); ++r)
    for (int j = 0; j < kJoints; ++j) {
      const Vec3 p = seq.block<1, 3>(r, 3 * j).transpose();
      out.block<1, 3>(r, 3 * j) = (scale * (R * p) + t).transpose();
    }
  return out;
}

}  // namespace

TEST_CASE("mpjpe: exact zero and the uniform 10mm offset") {
  RandomStream rng(1);
  const Mat gt = random_pose_rows(rng, 5);
  CHECK(mpjpe_mm(gt, gt) == 0.0);

  // Roots aligned, every other joint shifted 1 cm along x.
  Mat pred = gt;
  for (Eigen::Index r = 0; r < pred.rows(); ++r)
    for (int j = 1; j < kJoints; ++j) pred(r, 3 * j) += 0.01;
  CHECK(mpjpe_mm(pred, gt) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("mpjpe: matches a brute-force oracle on random input") {
  RandomStream rng(2);
  const Mat gt = random_pose_rows(rng, 7);
  Mat pred = gt;
  for (Eigen::Index r = 0; r < pred.rows(); ++r)
    for (Eigen::Index c = 0; c < pred.cols(); ++c) pred(r, c) += rng.normal(0.0, 0.02);

  // Independent double loop over frames and joints.
  double sum = 0.0;
  long count = 0;
  for (Eigen::Index r = 0; r < gt.rows(); ++r) {
    const Vec3 pr = pred.block<1, 3>(r, 0).transpose();
    const Vec3 gr = gt.block<1, 3>(r, 0).transpose();
    for (int j = 1; j < kJoints; ++j) {
      const Vec3 p = pred.block<1, 3>(r, 3 * j).transpose() - pr;
      const Vec3 g = gt.block<1, 3>(r, 3 * j).transpose() - gr;
      sum += (p - g).norm();
      ++count;
    }
  }
  const double oracle = sum / static_cast<double>(count) * 1000.0;
  CHECK(mpjpe_mm(pred, gt) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("mpjpe: symmetric in its arguments") {
  RandomStream rng(3);
  const Mat gt = random_pose_rows(rng, 4);
  Mat pred = gt;
  for (Eigen::Index r = 0; r < pred.rows(); ++r)
    for (Eigen::Index c = 0; c < pred.cols(); ++c) pred(r, c) += rng.normal(0.0, 0.05);
  CHECK(mpjpe_mm(pred, gt) == mpjpe_mm(gt, pred));
}

TEST_CASE("pa_mpjpe: invariant to similarity transforms of the prediction") {
  RandomStream rng(4);
  const Mat gt = random_pose_rows(rng, 3);
  const Mat3 R = testing::random_rotation(rng);
  const Mat pred = apply_similarity(gt, R, Vec3(0.3, -0.2, 1.0), 0.5);
  CHECK(pa_mpjpe_mm(pred, gt) < 1e-6);
  CHECK(pa_mpjpe_mm(gt, gt) < 1e-9);  // SVD round-off only
}

TEST_CASE("pa_mpjpe: agrees with the quaternion-eigenvector oracle") {
  RandomStream rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat gt = random_pose_rows(rng, 1);
    Mat pred = gt;
    for (Eigen::Index c = 0; c < pred.cols(); ++c) pred(0, c) += rng.normal(0.0, 0.03);

    Mat p(kJoints, 3), g(kJoints, 3);
    for (int j = 0; j < kJoints; ++j) {
      p.row(j) = pred.block<1, 3>(0, 3 * j);
      g.row(j) = gt.block<1, 3>(0, 3 * j);
    }
    const Mat horn = testing::horn_similarity_align(p, g);
    double sum = 0.0;
    for (int j = 1; j < kJoints; ++j) sum += (horn.row(j) - g.row(j)).norm();
    const double oracle_mm = sum / (kJoints - 1) * 1000.0;
    CHECK(std::abs(pa_mpjpe_mm(pred, gt) - oracle_mm) < 1e-3);
  }
}

TEST_CASE("pa_mpjpe: symmetric for near-identical inputs") {
  RandomStream rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat gt = random_pose_rows(rng, 2);
    Mat pred = gt;
    for (Eigen::Index r = 0; r < pred.rows(); ++r)
      for (Eigen::Index c = 0; c < pred.cols(); ++c) pred(r, c) += rng.normal(0.0, 1e-5);
    CHECK(std::abs(pa_mpjpe_mm(pred, gt) - pa_mpjpe_mm(gt, pred)) < 1e-6);
  }
}

TEST_CASE("pa_mpjpe <= mpjpe on structured prediction errors") {
  RandomStream rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat gt = random_pose_rows(rng, 1);
    Mat3 R = Eigen::AngleAxisd(rng.uniform(0.02, 0.15),
                               Vec3(rng.normal(), rng.normal(), rng.normal()).normalized())
                 .toRotationMatrix();
    Mat pred = apply_similarity(gt, R, Vec3::Zero(), 1.0 + rng.uniform(-0.05, 0.05));
    const double sigma = rng.uniform(0.002, 0.02);
    for (Eigen::Index c = 0; c < pred.cols(); ++c) pred(0, c) += rng.normal(0.0, sigma);
    // Re-pin the root, matching the root-relative output convention.
    const Vec3 root = pred.block<1, 3>(0, 0).transpose();
    for (int j = 0; j < kJoints; ++j)
      pred.block<1, 3>(0, 3 * j) -= root.transpose();
    CHECK(pa_mpjpe_mm(pred, gt) <= mpjpe_mm(pred, gt) + 1e-9);
  }
}

TEST_CASE("pa_mpjpe: collinear joints are rejected") {
  Mat gt(1, 9), pred(1, 9);
  gt << 0, 0, 0, 1, 0, 0, 2, 0, 0;  // three points on a line
  pred = gt;
  CHECK_THROWS_AS(pa_mpjpe_mm(pred, gt), DegenerateConfiguration);
}

TEST_CASE("metrics: shape mismatches are rejected") {
  Mat a(2, 9), b(3, 9);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS(mpjpe_mm(a, b), ShapeMismatch);
  CHECK_THROWS_AS(pa_mpjpe_mm(a, b), ShapeMismatch);
}

TEST_CASE("aggregate_report: frame-weighted means") {
  std::vector<SequenceMetrics> rows = {{"a", 10, 20.0, 15.0}, {"b", 30, 40.0, 35.0}};
  const MetricReport rep = aggregate_report(rows, EvalFingerprint{}, 42);
  CHECK(rep.mpjpe_mm == doctest::Approx((10 * 20.0 + 30 * 40.0) / 40.0));
  CHECK(rep.pa_mpjpe_mm == doctest::Approx((10 * 15.0 + 30 * 35.0) / 40.0));
  CHECK(rep.per_sequence.size() == 2);
  CHECK(rep.seed == 42);
}
