#include "mocap/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>

#include "mocap/container.hpp"
#include "mocap/errors.hpp"

namespace mocap {

namespace {

void append_f32_le(std::string& out, const Mat& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const float f = static_cast<float>(m(r, c));
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      out.push_back(static_cast<char>(u & 0xff));
      out.push_back(static_cast<char>((u >> 8) & 0xff));
      out.push_back(static_cast<char>((u >> 16) & 0xff));
      out.push_back(static_cast<char>((u >> 24) & 0xff));
    }
}

std::string hash_payload(const KeyValueConfig& config,
                         const std::vector<std::pair<std::string, Mat>>& arrays) {
  // Metadata except the hash itself, then each array's name and bytes in
  // manifest order.
  std::string payload;
  for (const auto& [k, v] : config.entries()) {
    if (k == "hash") continue;
    payload += k;
    payload += '=';
    payload += v;
    payload += '\n';
  }
  for (const auto& [name, m] : arrays) {
    payload += name;
    payload += ':';
    append_f32_le(payload, m);
  }
  return payload;
}

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

const Mat* Checkpoint::find_array(const std::string& name) const {
  for (const auto& [n, m] : arrays)
    if (n == name) return &m;
  return nullptr;
}

void Checkpoint::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir / "arrays");

  KeyValueConfig manifest = config;
  manifest.set_int("schema_version", 1);
  for (const auto& [name, m] : arrays)
    manifest.set("array." + name,
                 std::to_string(m.rows()) + " " + std::to_string(m.cols()));
  manifest.set("hash", to_hex(fnv1a64(hash_payload(manifest, arrays))));

  for (const auto& [name, m] : arrays) write_f32_array(dir / "arrays" / (name + ".f32"), m);
  manifest.write_file(dir / "manifest.txt");
}

Checkpoint Checkpoint::load(const std::filesystem::path& dir) {
  Checkpoint ck;
  ck.config = KeyValueConfig::parse_file(dir / "manifest.txt");
  if (ck.config.get_int("schema_version", 0) != 1)
    throw FormatError(dir.string() + ": unsupported checkpoint schema");

  for (const std::string& key : ck.config.keys_with_prefix("array.")) {
    const std::string name = key.substr(6);
    std::stringstream ss(ck.config.get_string(key));
    long rows = 0, cols = 0;
    if (!(ss >> rows >> cols))
      throw FormatError(dir.string() + ": bad shape for array " + name);
    ck.arrays.emplace_back(name, read_f32_array(dir / "arrays" / (name + ".f32"), rows, cols));
  }

  const std::string stored = ck.config.get_string("hash");
  const std::string computed = to_hex(fnv1a64(hash_payload(ck.config, ck.arrays)));
  if (stored != computed)
    throw HashMismatch(dir.string() + ": checkpoint hash mismatch (stored " + stored +
                       ", computed " + computed + ")");
  return ck;
}

}  // namespace mocap
