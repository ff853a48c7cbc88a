#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mocap {

/// Flat `key = value` text file with '#' comments. Keys are unique; values
/// are free-form strings parsed on access. Insertion order is preserved so
/// that serialization is deterministic.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_string(const std::string& text, const std::string& origin = "");
  static KeyValueConfig parse_file(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  /// Typed getters; the non-defaulted forms throw InvalidConfig when the key
  /// is missing, all throw when the value does not parse.
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

  /// Comma-separated lists.
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<long> get_int_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  void set_int(const std::string& key, long value);
  void set_double(const std::string& key, double value);
  void set_u64(const std::string& key, std::uint64_t value);

  /// Keys beginning with the prefix, in insertion order.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  /// Canonical serialization: one `key = value` per line, insertion order.
  std::string serialize() const;
  void write_file(const std::filesystem::path& path) const;

 private:
  const std::string* find(const std::string& key) const;
  [[noreturn]] void missing(const std::string& key) const;

  std::vector<std::pair<std::string, std::string>> entries_;
  std::string origin_;
};

/// Formats a double so that parsing it back is lossless (shortest-roundtrip
/// via %.17g with cleanup for integral values).
std::string format_double(double v);

}  // namespace mocap
