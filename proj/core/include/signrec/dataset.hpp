#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "signrec/lexicon.hpp"
#include "signrec/pose_io.hpp"

namespace signrec {

enum class Split { Train, Val, Test };

Split parse_split(const std::string& name);
std::string split_name(Split split);

// One WLASL-style metadata instance. phonemes is empty before joining and has
// one entry per inventory type afterwards (-1 for missing).
struct MetadataInstance {
  std::string video_id;
  Split split = Split::Train;
  std::vector<int> phonemes;
};

struct MetadataEntry {
  std::string gloss;
  std::vector<MetadataInstance> instances;
};

// JSON array of {gloss, instances:[{video_id, split, phonemes?}]}. Unknown
// keys are ignored so real benchmark exports load unchanged.
std::vector<MetadataEntry> load_metadata(const std::string& path);
void save_metadata(const std::vector<MetadataEntry>& entries, const std::string& path);

struct VideoSample {
  std::string video_id;
  int gloss_id = 0;  // index into the SampleSet vocabulary
  std::vector<int> phoneme_labels;  // per inventory type; all kMissing when unmatched
  Split split = Split::Train;
  std::optional<PoseSequence> pose;

  bool labeled() const {
    for (int v : phoneme_labels)
      if (v != kMissing) return true;
    return false;
  }
};

class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(std::vector<std::string> vocabulary, PhonemeInventory inventory,
            std::vector<VideoSample> samples);

  const std::vector<VideoSample>& samples() const { return samples_; }
  std::vector<VideoSample>& samples() { return samples_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const PhonemeInventory& inventory() const { return inventory_; }
  int vocabulary_size() const { return static_cast<int>(vocabulary_.size()); }

  double coverage() const;  // labeled samples / total samples
  std::vector<int> split_indices(Split split) const;

 private:
  std::vector<std::string> vocabulary_;
  PhonemeInventory inventory_;
  std::vector<VideoSample> samples_;
};

// Table-1-style join summary.
struct JoinSummary {
  int matched_signs = 0;
  int unmatched_signs = 0;
  int labeled_videos[3] = {0, 0, 0};    // train, val, test
  int unlabeled_videos[3] = {0, 0, 0};
  int labeled_total = 0;
  int unlabeled_total = 0;
  double coverage = 0.0;
};

// Joins benchmark metadata with the lexicon: matched glosses receive the full
// phoneme tuple, unmatched videos get all -1. Vocabulary and splits are kept.
SampleSet join_datasets(const std::vector<MetadataEntry>& metadata,
                        const Lexicon& lexicon, JoinSummary* summary = nullptr);

// Builds a SampleSet from already-joined metadata (phonemes present per
// instance). Instances without a phonemes array load as all-missing.
SampleSet sampleset_from_metadata(const std::vector<MetadataEntry>& metadata,
                                  const PhonemeInventory& inventory);

// Writes the joined sample set back in the metadata JSON shape.
std::vector<MetadataEntry> metadata_from_sampleset(const SampleSet& set);

// Disjoint, exhaustive partition of one split by phoneme-label presence.
// Returns (with-labels indices, without-labels indices).
std::pair<std::vector<int>, std::vector<int>> partition_by_coverage(
    const SampleSet& set, Split split);

// Loads <pose_dir>/<video_id>.pose for every sample and applies per-clip
// normalization.
void load_poses(SampleSet& set, const std::string& pose_dir);

}  // namespace signrec
