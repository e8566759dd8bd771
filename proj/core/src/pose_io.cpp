#include "signrec/pose_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "signrec/errors.hpp"

namespace signrec {

namespace {

constexpr char kMagic[4] = {'P', 'S', 'Q', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_u32(out, bits);
}

float read_f32(std::istream& in) {
  std::uint32_t bits = read_u32(in);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

void validate_pose(const PoseSequence& pose) {
  if (pose.frames < 1 || pose.keypoints < 1)
    throw DataError("pose sequence needs at least one frame and one keypoint");
  if (pose.coords != 2 && pose.coords != 3)
    throw DataError("pose coords must be 2 or 3, got " + std::to_string(pose.coords));
  const std::size_t expected = static_cast<std::size_t>(pose.frames) *
                               pose.keypoints * pose.coords;
  if (pose.data.size() != expected)
    throw DataError("pose payload has " + std::to_string(pose.data.size()) +
                    " values, header declares " + std::to_string(expected));
  for (float v : pose.data)
    if (!std::isfinite(v)) throw DataError("non-finite coordinate in pose sequence");
}

void save_pose(const PoseSequence& pose, const std::string& path) {
  validate_pose(pose);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write pose file: " + path);
  out.write(kMagic, 4);
  write_u32(out, static_cast<std::uint32_t>(pose.frames));
  write_u32(out, static_cast<std::uint32_t>(pose.keypoints));
  write_u32(out, static_cast<std::uint32_t>(pose.coords));
  write_f32(out, pose.fps);
  for (float v : pose.data) write_f32(out, v);
}

void save_pose_json(const PoseSequence& pose, const std::string& path) {
  validate_pose(pose);
  nlohmann::json j;
  j["T"] = pose.frames;
  j["K"] = pose.keypoints;
  j["C"] = pose.coords;
  j["fps"] = pose.fps;
  j["frames"] = pose.data;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write pose file: " + path);
  out << j.dump();
}

PoseSequence load_pose(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open pose file: " + path);

  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  PoseSequence pose;
  if (in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) {
    pose.frames = static_cast<int>(read_u32(in));
    pose.keypoints = static_cast<int>(read_u32(in));
    pose.coords = static_cast<int>(read_u32(in));
    pose.fps = read_f32(in);
    if (!in) throw DataError("truncated pose header: " + path);
    const std::size_t expected = static_cast<std::size_t>(pose.frames) *
                                 std::max(pose.keypoints, 0) * std::max(pose.coords, 0);
    pose.data.resize(expected);
    for (std::size_t i = 0; i < expected; ++i) {
      pose.data[i] = read_f32(in);
      if (!in) throw DataError("pose payload shorter than header declares: " + path);
    }
    char extra;
    if (in.read(&extra, 1))
      throw DataError("pose payload longer than header declares: " + path);
  } else {
    // JSON fallback
    in.close();
    std::ifstream jin(path);
    nlohmann::json j;
    try {
      jin >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DataError("unrecognized pose file " + path + ": " + e.what());
    }
    try {
      pose.frames = j.at("T").get<int>();
      pose.keypoints = j.at("K").get<int>();
      pose.coords = j.at("C").get<int>();
      pose.fps = j.value("fps", 25.0f);
      pose.data = j.at("frames").get<std::vector<float>>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError("malformed pose JSON " + path + ": " + e.what());
    }
  }
  validate_pose(pose);
  return pose;
}

void normalize_clip(PoseSequence& pose) {
  if (pose.data.empty()) return;
  double mean = 0.0;
  for (float v : pose.data) mean += v;
  mean /= static_cast<double>(pose.data.size());
  float max_abs = 0.0f;
  for (float& v : pose.data) {
    v = static_cast<float>(v - mean);
    max_abs = std::max(max_abs, std::abs(v));
  }
  if (max_abs > 0.0f)
    for (float& v : pose.data) v /= max_abs;
}

PoseSequence resample(const PoseSequence& pose, int target_frames) {
  if (target_frames < 1) throw DataError("target frame count must be >= 1");
  PoseSequence out;
  out.frames = target_frames;
  out.keypoints = pose.keypoints;
  out.coords = pose.coords;
  out.fps = pose.fps;
  out.data.resize(static_cast<std::size_t>(target_frames) * pose.keypoints * pose.coords);

  const int per_frame = pose.keypoints * pose.coords;
  for (int j = 0; j < target_frames; ++j) {
    double pos = target_frames == 1
                     ? 0.0
                     : static_cast<double>(j) * (pose.frames - 1) / (target_frames - 1);
    int lo = static_cast<int>(pos);
    int hi = std::min(lo + 1, pose.frames - 1);
    double w = pos - lo;
    for (int i = 0; i < per_frame; ++i) {
      double a = pose.data[static_cast<std::size_t>(lo) * per_frame + i];
      double b = pose.data[static_cast<std::size_t>(hi) * per_frame + i];
      out.data[static_cast<std::size_t>(j) * per_frame + i] =
          static_cast<float>((1.0 - w) * a + w * b);
    }
  }
  return out;
}

}  // namespace signrec
