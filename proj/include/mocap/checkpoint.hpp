#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mocap/config.hpp"
#include "mocap/skeleton.hpp"

namespace mocap {

/// A checkpoint is a directory: manifest.txt (scalar metadata + the array
/// index + a content hash) and arrays/<name>.f32 in the raw-array format.
/// The hash covers the array bytes and the metadata; load() verifies it and
/// throws HashMismatch on corruption.
struct Checkpoint {
  KeyValueConfig config;
  std::vector<std::pair<std::string, Mat>> arrays;

  const Mat* find_array(const std::string& name) const;

  void save(const std::filesystem::path& dir) const;
  static Checkpoint load(const std::filesystem::path& dir);
};

/// FNV-1a 64-bit over a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace mocap
