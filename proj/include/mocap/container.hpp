#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mocap/skeleton.hpp"

namespace mocap {

/// Low-level raw-array I/O: little-endian 32-bit floats, row-major, written
/// byte-by-byte so the files are identical on any host.
void write_f32_array(const std::filesystem::path& path, const Mat& m);
Mat read_f32_array(const std::filesystem::path& path, Eigen::Index rows, Eigen::Index cols);

/// On-disk sequence: a directory holding manifest.txt plus one .f32 file per
/// named array. Known arrays and their shapes:
///   rotations  N x (J*6)
///   positions  N x (J*3)
///   imu        N x 72
///   keypoints  N x (K*3)
/// Empty members are simply absent from the manifest; unknown array names in
/// a manifest are rejected.
struct SequenceContainer {
  double fps = 60.0;
  int frames = 0;
  int joints = 24;
  int keypoint_count = 33;
  Mat rotations;
  Mat positions;
  Mat imu;
  Mat keypoints;

  void validate() const;
  void save(const std::filesystem::path& dir) const;
  static SequenceContainer load(const std::filesystem::path& dir);
};

/// Loads every sequence directory under `dir` (sorted by name).
std::vector<SequenceContainer> load_container_set(const std::filesystem::path& dir);

}  // namespace mocap
