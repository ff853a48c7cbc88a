#pragma once

// Test-only oracles, independent of the library code paths they check.

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "mocap/random.hpp"
#include "mocap/skeleton.hpp"

namespace mocap::testing {

/// Random rotation via axis-angle (Rodrigues through Eigen's AngleAxis),
/// independent of the 6D code path.
inline Mat3 random_rotation(RandomStream& rng) {
  Vec3 axis(rng.normal(), rng.normal(), rng.normal());
  while (axis.norm() < 1e-6) axis = Vec3(rng.normal(), rng.normal(), rng.normal());
  axis.normalize();
  const double angle = rng.uniform(-M_PI, M_PI);
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

inline Rot6d random_rot6d(RandomStream& rng) { return matrix_to_rot6d(random_rotation(rng)); }

/// N x 6J matrix of random valid rotations.
inline Mat random_rotation_sequence(RandomStream& rng, int frames, int joints) {
  Mat rot(frames, 6 * joints);
  for (int n = 0; n < frames; ++n)
    for (int j = 0; j < joints; ++j)
      rot.block<1, 6>(n, 6 * j) = random_rot6d(rng).transpose();
  return rot;
}

/// Horn's closed-form absolute orientation (quaternion eigenvector route),
/// an algebraic path independent of the SVD-based implementation. Returns
/// the aligned point set.
inline Mat horn_similarity_align(const Mat& points, const Mat& reference) {
  const Eigen::Index n = points.rows();
  const Eigen::RowVector3d mu_p = points.colwise().mean();
  const Eigen::RowVector3d mu_r = reference.colwise().mean();
  const Mat pc = points.rowwise() - mu_p;
  const Mat rc = reference.rowwise() - mu_r;

  const Mat3 S = pc.transpose() * rc;  // correlation: sum p_i r_i^T
  Eigen::Matrix4d N;
  const double sxx = S(0, 0), sxy = S(0, 1), sxz = S(0, 2);
  const double syx = S(1, 0), syy = S(1, 1), syz = S(1, 2);
  const double szx = S(2, 0), szy = S(2, 1), szz = S(2, 2);
  N << sxx + syy + szz, syz - szy, szx - sxz, sxy - syx,
       syz - szy, sxx - syy - szz, sxy + syx, szx + sxz,
       szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy,
       sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(N);
  Eigen::Index best;
  eig.eigenvalues().maxCoeff(&best);
  const Eigen::Vector4d q = eig.eigenvectors().col(best);  // (w, x, y, z)
  const Eigen::Quaterniond quat(q(0), q(1), q(2), q(3));
  const Mat3 R = quat.normalized().toRotationMatrix();

  // Least-squares scale in the reference frame.
  const Mat rotated = (R * pc.transpose()).transpose();
  const double scale = rotated.cwiseProduct(rc).sum() / pc.squaredNorm();

  Mat aligned = scale * rotated;
  aligned.rowwise() += mu_r;
  return aligned;
}

}  // namespace mocap::testing
