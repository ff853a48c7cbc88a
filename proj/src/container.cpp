#include "mocap/container.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mocap/config.hpp"
#include "mocap/errors.hpp"
#include "mocap/sensors.hpp"

namespace mocap {

namespace {

constexpr int kSchemaVersion = 1;

void append_le32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t read_le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_f32_array(const std::filesystem::path& path, const Mat& m) {
  std::string bytes;
  bytes.reserve(static_cast<std::size_t>(m.size()) * 4);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const float f = static_cast<float>(m(r, c));
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      append_le32(bytes, u);
    }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

Mat read_f32_array(const std::filesystem::path& path, Eigen::Index rows, Eigen::Index cols) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path.string());
  const std::streamsize size = in.tellg();
  const std::streamsize want = static_cast<std::streamsize>(rows) * cols * 4;
  if (size != want)
    throw FormatError(path.string() + ": expected " + std::to_string(want) + " bytes, found " +
                      std::to_string(size));
  std::vector<unsigned char> bytes(static_cast<std::size_t>(size));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) throw IoError("short read from " + path.string());

  Mat m(rows, cols);
  const unsigned char* p = bytes.data();
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const std::uint32_t u = read_le32(p);
      p += 4;
      float f;
      std::memcpy(&f, &u, 4);
      m(r, c) = static_cast<double>(f);
    }
  return m;
}

void SequenceContainer::validate() const {
  if (frames < 1) throw FormatError("container: frames must be >= 1");
  if (joints < 1 || keypoint_count < 0) throw FormatError("container: bad joint/keypoint count");
  if (!(fps > 0.0)) throw FormatError("container: fps must be positive");
  auto check = [&](const Mat& m, const char* name, Eigen::Index cols) {
    if (m.size() == 0) return;
    if (m.rows() != frames || m.cols() != cols)
      throw FormatError(std::string("container: array '") + name + "' has shape " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                        ", expected " + std::to_string(frames) + "x" + std::to_string(cols));
    if (!m.allFinite())
      throw FormatError(std::string("container: array '") + name + "' has non-finite values");
  };
  check(rotations, "rotations", 6L * joints);
  check(positions, "positions", 3L * joints);
  check(imu, "imu", kImuChannels);
  check(keypoints, "keypoints", 3L * keypoint_count);
}

void SequenceContainer::save(const std::filesystem::path& dir) const {
  validate();
  std::filesystem::create_directories(dir);

  KeyValueConfig manifest;
  manifest.set_int("schema_version", kSchemaVersion);
  manifest.set_double("fps", fps);
  manifest.set_int("frames", frames);
  manifest.set_int("joints", joints);
  manifest.set_int("keypoints", keypoint_count);

  auto emit = [&](const Mat& m, const std::string& name, const std::string& shape) {
    if (m.size() == 0) return;
    manifest.set("array." + name, shape);
    write_f32_array(dir / (name + ".f32"), m);
  };
  emit(rotations, "rotations",
       std::to_string(frames) + " " + std::to_string(joints) + " 6");
  emit(positions, "positions",
       std::to_string(frames) + " " + std::to_string(joints) + " 3");
  emit(imu, "imu", std::to_string(frames) + " 72");
  emit(keypoints, "keypoints",
       std::to_string(frames) + " " + std::to_string(keypoint_count) + " 3");

  manifest.write_file(dir / "manifest.txt");
}

SequenceContainer SequenceContainer::load(const std::filesystem::path& dir) {
  const KeyValueConfig manifest = KeyValueConfig::parse_file(dir / "manifest.txt");
  if (manifest.get_int("schema_version") != kSchemaVersion)
    throw FormatError(dir.string() + ": unsupported schema_version");

  SequenceContainer c;
  c.fps = manifest.get_double("fps");
  c.frames = static_cast<int>(manifest.get_int("frames"));
  c.joints = static_cast<int>(manifest.get_int("joints"));
  c.keypoint_count = static_cast<int>(manifest.get_int("keypoints"));

  auto parse_shape = [&](const std::string& key) {
    std::vector<long> dims;
    std::stringstream ss(manifest.get_string(key));
    long d;
    while (ss >> d) dims.push_back(d);
    if (dims.empty()) throw FormatError(dir.string() + ": bad shape for " + key);
    long cols = 1;
    for (std::size_t i = 1; i < dims.size(); ++i) cols *= dims[i];
    return std::pair<long, long>(dims[0], cols);
  };

  for (const std::string& key : manifest.keys_with_prefix("array.")) {
    const std::string name = key.substr(6);
    const auto [rows, cols] = parse_shape(key);
    const Mat m = read_f32_array(dir / (name + ".f32"), rows, cols);
    if (name == "rotations")
      c.rotations = m;
    else if (name == "positions")
      c.positions = m;
    else if (name == "imu")
      c.imu = m;
    else if (name == "keypoints")
      c.keypoints = m;
    else
      throw FormatError(dir.string() + ": unknown array '" + name + "'");
  }
  c.validate();
  return c;
}

std::vector<SequenceContainer> load_container_set(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> entries;
  if (!std::filesystem::is_directory(dir))
    throw IoError("container set directory not found: " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_directory()) entries.push_back(e.path());
  std::sort(entries.begin(), entries.end());
  std::vector<SequenceContainer> out;
  out.reserve(entries.size());
  for (const auto& p : entries) out.push_back(SequenceContainer::load(p));
  if (out.empty()) throw IoError("no sequence containers under " + dir.string());
  return out;
}

}  // namespace mocap
