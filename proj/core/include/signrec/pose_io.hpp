#pragma once

#include <string>
#include <vector>

namespace signrec {

// A pose-keypoint clip: frames x keypoints x coords, row-major.
struct PoseSequence {
  int frames = 0;     // T
  int keypoints = 0;  // K
  int coords = 0;     // C, 2 or 3
  float fps = 25.0f;  // informational
  std::vector<float> data;  // T*K*C floats, [t][k][c]

  float& at(int t, int k, int c) {
    return data[(static_cast<std::size_t>(t) * keypoints + k) * coords + c];
  }
  float at(int t, int k, int c) const {
    return data[(static_cast<std::size_t>(t) * keypoints + k) * coords + c];
  }
  std::size_t value_count() const { return data.size(); }
};

// Throws DataError when shape fields are inconsistent with the payload or a
// value is non-finite.
void validate_pose(const PoseSequence& pose);

// Binary pose file: magic "PSQ1", u32 T, K, C, f32 fps, then T*K*C
// little-endian f32 values. Lossless round trip.
void save_pose(const PoseSequence& pose, const std::string& path);

// JSON fallback for debugging: {"T":..,"K":..,"C":..,"fps":..,"frames":[..]}.
void save_pose_json(const PoseSequence& pose, const std::string& path);

// Dispatches on the file's leading bytes (binary magic vs JSON).
PoseSequence load_pose(const std::string& path);

// Per-clip normalization: translate the coordinate mean to 0, then scale so
// the max absolute coordinate is 1. A constant clip is left centered.
void normalize_clip(PoseSequence& pose);

// Linear-interpolation resampling to a fixed frame count.
PoseSequence resample(const PoseSequence& pose, int target_frames);

}  // namespace signrec
