#include "signrec/dataset.hpp"

#include <fstream>

#include <json.hpp>

#include "signrec/errors.hpp"

namespace signrec {

Split parse_split(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "val") return Split::Val;
  if (name == "test") return Split::Test;
  throw DataError("unknown split value: '" + name + "'");
}

std::string split_name(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

std::vector<MetadataEntry> load_metadata(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open metadata file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed metadata JSON " + path + ": " + e.what());
  }
  if (!j.is_array()) throw DataError("metadata must be a JSON array of gloss entries");
  if (j.empty()) throw DataError("metadata gloss list is empty");

  std::vector<MetadataEntry> entries;
  entries.reserve(j.size());
  try {
    for (const auto& je : j) {
      MetadataEntry entry;
      entry.gloss = je.at("gloss").get<std::string>();
      for (const auto& ji : je.at("instances")) {
        MetadataInstance inst;
        inst.video_id = ji.at("video_id").get<std::string>();
        inst.split = parse_split(ji.at("split").get<std::string>());
        if (ji.contains("phonemes"))
          inst.phonemes = ji.at("phonemes").get<std::vector<int>>();
        entry.instances.push_back(std::move(inst));
      }
      entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed metadata JSON " + path + ": " + e.what());
  }
  return entries;
}

void save_metadata(const std::vector<MetadataEntry>& entries, const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const MetadataEntry& entry : entries) {
    nlohmann::json je;
    je["gloss"] = entry.gloss;
    nlohmann::json insts = nlohmann::json::array();
    for (const MetadataInstance& inst : entry.instances) {
      nlohmann::json ji;
      ji["video_id"] = inst.video_id;
      ji["split"] = split_name(inst.split);
      if (!inst.phonemes.empty()) ji["phonemes"] = inst.phonemes;
      insts.push_back(std::move(ji));
    }
    je["instances"] = std::move(insts);
    j.push_back(std::move(je));
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write metadata file: " + path);
  out << j.dump(1) << "\n";
}

SampleSet::SampleSet(std::vector<std::string> vocabulary, PhonemeInventory inventory,
                     std::vector<VideoSample> samples)
    : vocabulary_(std::move(vocabulary)),
      inventory_(std::move(inventory)),
      samples_(std::move(samples)) {
  for (const VideoSample& s : samples_) {
    if (s.gloss_id < 0 || s.gloss_id >= vocabulary_size())
      throw DataError("sample '" + s.video_id + "' has gloss id out of range");
    if (static_cast<int>(s.phoneme_labels.size()) != inventory_.type_count())
      throw DataError("sample '" + s.video_id + "' has wrong phoneme label arity");
  }
}

double SampleSet::coverage() const {
  if (samples_.empty()) return 0.0;
  int labeled = 0;
  for (const VideoSample& s : samples_)
    if (s.labeled()) ++labeled;
  return static_cast<double>(labeled) / static_cast<double>(samples_.size());
}

std::vector<int> SampleSet::split_indices(Split split) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < samples_.size(); ++i)
    if (samples_[i].split == split) out.push_back(static_cast<int>(i));
  return out;
}

SampleSet join_datasets(const std::vector<MetadataEntry>& metadata,
                        const Lexicon& lexicon, JoinSummary* summary) {
  if (metadata.empty()) throw DataError("metadata gloss list is empty");
  const int type_count = lexicon.inventory().type_count();
  const std::vector<int> all_missing(type_count, kMissing);

  JoinSummary s;
  std::vector<std::string> vocabulary;
  std::vector<VideoSample> samples;
  for (std::size_t g = 0; g < metadata.size(); ++g) {
    const MetadataEntry& entry = metadata[g];
    if (entry.gloss.empty()) throw DataError("empty gloss in metadata");
    vocabulary.push_back(entry.gloss);

    const int lex_id = lexicon.find_gloss(entry.gloss);
    const bool matched = lex_id >= 0;
    (matched ? s.matched_signs : s.unmatched_signs)++;

    for (const MetadataInstance& inst : entry.instances) {
      VideoSample sample;
      sample.video_id = inst.video_id;
      sample.gloss_id = static_cast<int>(g);
      sample.split = inst.split;
      sample.phoneme_labels = matched ? lexicon.sign(lex_id).phonemes : all_missing;
      const int si = static_cast<int>(inst.split);
      if (sample.labeled()) {
        s.labeled_videos[si]++;
        s.labeled_total++;
      } else {
        s.unlabeled_videos[si]++;
        s.unlabeled_total++;
      }
      samples.push_back(std::move(sample));
    }
  }
  const int total = s.labeled_total + s.unlabeled_total;
  s.coverage = total > 0 ? static_cast<double>(s.labeled_total) / total : 0.0;
  if (summary) *summary = s;
  return SampleSet(std::move(vocabulary), lexicon.inventory(), std::move(samples));
}

SampleSet sampleset_from_metadata(const std::vector<MetadataEntry>& metadata,
                                  const PhonemeInventory& inventory) {
  if (metadata.empty()) throw DataError("metadata gloss list is empty");
  const std::vector<int> all_missing(inventory.type_count(), kMissing);
  std::vector<std::string> vocabulary;
  std::vector<VideoSample> samples;
  for (std::size_t g = 0; g < metadata.size(); ++g) {
    vocabulary.push_back(metadata[g].gloss);
    for (const MetadataInstance& inst : metadata[g].instances) {
      VideoSample sample;
      sample.video_id = inst.video_id;
      sample.gloss_id = static_cast<int>(g);
      sample.split = inst.split;
      sample.phoneme_labels = inst.phonemes.empty() ? all_missing : inst.phonemes;
      samples.push_back(std::move(sample));
    }
  }
  return SampleSet(std::move(vocabulary), inventory, std::move(samples));
}

std::vector<MetadataEntry> metadata_from_sampleset(const SampleSet& set) {
  std::vector<MetadataEntry> entries(set.vocabulary().size());
  for (std::size_t g = 0; g < set.vocabulary().size(); ++g)
    entries[g].gloss = set.vocabulary()[g];
  for (const VideoSample& s : set.samples()) {
    MetadataInstance inst;
    inst.video_id = s.video_id;
    inst.split = s.split;
    inst.phonemes = s.phoneme_labels;
    entries[s.gloss_id].instances.push_back(std::move(inst));
  }
  return entries;
}

std::pair<std::vector<int>, std::vector<int>> partition_by_coverage(
    const SampleSet& set, Split split) {
  std::pair<std::vector<int>, std::vector<int>> parts;
  for (int i : set.split_indices(split)) {
    if (set.samples()[i].labeled())
      parts.first.push_back(i);
    else
      parts.second.push_back(i);
  }
  return parts;
}

void load_poses(SampleSet& set, const std::string& pose_dir) {
  for (VideoSample& s : set.samples()) {
    PoseSequence pose = load_pose(pose_dir + "/" + s.video_id + ".pose");
    normalize_clip(pose);
    s.pose = std::move(pose);
  }
}

}  // namespace signrec
