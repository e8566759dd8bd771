#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "signrec/dataset.hpp"

namespace signrec {

// Desk-scale synthetic dataset. Three phoneme types control the pose
// compositionally: type 0 a static keypoint offset pattern ("handshape"),
// type 1 the trajectory centroid ("location"), type 2 the trajectory shape
// over time ("movement"). Types past the first three are labels only.
struct SynthConfig {
  int glosses = 50;
  std::vector<int> cardinalities = {5, 6, 4};
  int videos_per_gloss = 20;
  int frames = 32;
  int keypoints = 16;  // includes kAnchorKeypoints fixed reference points
  int coords = 2;
  double noise_sigma = 0.15;
  double coverage = 0.5;        // fraction of videos keeping phoneme labels
  double collision_rate = 0.0;  // fraction of glosses reusing an earlier tuple
  float fps = 25.0f;
  std::uint64_t seed = 7;
};

// Fixed reference keypoints so absolute hand location survives per-clip
// centering, the way body joints do in real pose data.
constexpr int kAnchorKeypoints = 4;

struct SynthVideoRecord {
  std::string video_id;
  std::string gloss;
  Split split = Split::Train;
  bool labeled = false;
};

struct SynthManifest {
  SynthConfig config;
  std::vector<std::pair<std::string, std::vector<int>>> gloss_tuples;
  std::vector<SynthVideoRecord> videos;
  int labeled_count = 0;
};

struct SynthResult {
  Lexicon lexicon;
  SampleSet samples;  // poses attached and normalized
  SynthManifest manifest;
  std::vector<PoseSequence> raw_poses;  // unnormalized, one per sample, for disk
};

SynthResult generate_synthetic(const SynthConfig& config);

void save_manifest(const SynthManifest& manifest, const std::string& path);
SynthManifest load_manifest(const std::string& path);

}  // namespace signrec
