#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "signrec/dataset.hpp"
#include "signrec/errors.hpp"
#include "signrec/experiment.hpp"
#include "signrec/rng.hpp"
#include "signrec/synthetic.hpp"
#include "test_helpers.hpp"

using namespace signrec;

namespace {

PoseSequence random_pose(Rng& rng, int t, int k, int c) {
  PoseSequence pose;
  pose.frames = t;
  pose.keypoints = k;
  pose.coords = c;
  pose.fps = 25.0f;
  pose.data.resize(static_cast<std::size_t>(t) * k * c);
  for (float& v : pose.data) v = static_cast<float>(rng.gaussian());
  return pose;
}

}  // namespace

TEST_CASE("pose binary round trip is bit-exact") {
  TempDir dir;
  Rng rng(1);
  PoseSequence pose = random_pose(rng, 17, 5, 3);
  save_pose(pose, dir.file("a.pose"));
  PoseSequence loaded = load_pose(dir.file("a.pose"));
  CHECK(loaded.frames == pose.frames);
  CHECK(loaded.keypoints == pose.keypoints);
  CHECK(loaded.coords == pose.coords);
  CHECK(loaded.fps == pose.fps);
  CHECK(loaded.data == pose.data);
}

TEST_CASE("pose JSON fallback round trip") {
  TempDir dir;
  Rng rng(2);
  PoseSequence pose = random_pose(rng, 4, 3, 2);
  save_pose_json(pose, dir.file("a.json"));
  PoseSequence loaded = load_pose(dir.file("a.json"));
  CHECK(loaded.data == pose.data);
  CHECK(loaded.frames == pose.frames);
}

TEST_CASE("minimal pose file is accepted") {
  TempDir dir;
  PoseSequence pose;
  pose.frames = 1;
  pose.keypoints = 1;
  pose.coords = 2;
  pose.data = {0.5f, -0.25f};
  save_pose(pose, dir.file("m.pose"));
  CHECK(load_pose(dir.file("m.pose")).data == pose.data);
}

TEST_CASE("pose file errors") {
  TempDir dir;
  Rng rng(3);
  PoseSequence pose = random_pose(rng, 6, 4, 2);
  save_pose(pose, dir.file("a.pose"));

  SUBCASE("truncated payload") {
    std::string bytes = read_file(dir.file("a.pose"));
    write_file(dir.file("trunc.pose"), bytes.substr(0, bytes.size() - 8));
    CHECK_THROWS_AS(load_pose(dir.file("trunc.pose")), DataError);
  }
  SUBCASE("payload longer than header") {
    std::string bytes = read_file(dir.file("a.pose"));
    write_file(dir.file("long.pose"), bytes + std::string(4, '\0'));
    CHECK_THROWS_AS(load_pose(dir.file("long.pose")), DataError);
  }
  SUBCASE("garbage file") {
    write_file(dir.file("bad.pose"), "not a pose at all");
    CHECK_THROWS_AS(load_pose(dir.file("bad.pose")), DataError);
  }
  SUBCASE("non-finite values rejected on save") {
    pose.data[5] = std::nanf("");
    CHECK_THROWS_AS(save_pose(pose, dir.file("nan.pose")), DataError);
  }
  SUBCASE("bad coords") {
    pose.coords = 5;
    pose.data.resize(6 * 4 * 5);
    CHECK_THROWS_AS(save_pose(pose, dir.file("c5.pose")), DataError);
  }
}

TEST_CASE("normalize_clip centers and scales") {
  Rng rng(4);
  PoseSequence pose = random_pose(rng, 9, 4, 2);
  normalize_clip(pose);
  double mean = 0.0;
  float max_abs = 0.0f;
  for (float v : pose.data) {
    mean += v;
    max_abs = std::max(max_abs, std::abs(v));
  }
  mean /= pose.data.size();
  CHECK(std::abs(mean) < 1e-5);
  CHECK(max_abs == doctest::Approx(1.0f));
}

TEST_CASE("resample") {
  Rng rng(5);
  PoseSequence pose = random_pose(rng, 8, 2, 2);
  SUBCASE("identity when lengths match") {
    CHECK(resample(pose, 8).data == pose.data);
  }
  SUBCASE("single frame repeats") {
    PoseSequence one = random_pose(rng, 1, 2, 2);
    PoseSequence out = resample(one, 5);
    for (int t = 0; t < 5; ++t)
      for (int i = 0; i < 4; ++i) CHECK(out.data[t * 4 + i] == one.data[i]);
  }
  SUBCASE("endpoints preserved") {
    PoseSequence out = resample(pose, 21);
    CHECK(out.at(0, 0, 0) == pose.at(0, 0, 0));
    CHECK(out.at(20, 1, 1) == pose.at(7, 1, 1));
  }
}

namespace {

std::vector<MetadataEntry> toy_metadata() {
  // 10 glosses, 3 videos each; splits cycle train/val/test
  std::vector<MetadataEntry> entries;
  const Split splits[3] = {Split::Train, Split::Val, Split::Test};
  for (int g = 0; g < 10; ++g) {
    MetadataEntry e;
    e.gloss = "gloss" + std::to_string(g);
    for (int v = 0; v < 3; ++v)
      e.instances.push_back(
          {"vid" + std::to_string(g) + "_" + std::to_string(v), splits[v], {}});
    entries.push_back(std::move(e));
  }
  return entries;
}

Lexicon toy_lexicon_4_of_10() {
  // glosses 0, 2, 5, 7 of the metadata, plus one that never matches
  std::vector<PhonemeType> types(2);
  for (int t = 0; t < 2; ++t) {
    types[t].id = t;
    types[t].name = "t" + std::to_string(t);
    types[t].value_names = {"va", "vb", "vc", "vd", "ve"};
  }
  std::vector<Sign> signs;
  for (int g : {0, 2, 5, 7}) {
    Sign s;
    s.gloss = "GLOSS" + std::to_string(g);  // case differs on purpose
    s.phonemes = {g % 5, (g + 1) % 5};
    signs.push_back(std::move(s));
  }
  Sign extra;
  extra.gloss = "unrelated";
  extra.phonemes = {0, 0};
  signs.push_back(std::move(extra));
  return Lexicon(PhonemeInventory(std::move(types)), std::move(signs));
}

}  // namespace

TEST_CASE("toy join: counts by construction") {
  JoinSummary summary;
  SampleSet set = join_datasets(toy_metadata(), toy_lexicon_4_of_10(), &summary);
  CHECK(summary.matched_signs == 4);
  CHECK(summary.unmatched_signs == 6);
  CHECK(summary.labeled_total == 12);
  CHECK(summary.unlabeled_total == 18);
  CHECK(set.coverage() == doctest::Approx(0.4));
  CHECK(summary.coverage == doctest::Approx(0.4));
  CHECK(set.vocabulary_size() == 10);
  CHECK(set.samples().size() == 30);
}

TEST_CASE("join copies lexicon tuples verbatim and keeps splits") {
  const auto metadata = toy_metadata();
  const Lexicon lexicon = toy_lexicon_4_of_10();
  SampleSet set = join_datasets(metadata, lexicon);

  std::multiset<std::pair<std::string, int>> before, after;
  for (const auto& e : metadata)
    for (const auto& i : e.instances)
      before.insert({i.video_id, static_cast<int>(i.split)});
  for (const auto& s : set.samples())
    after.insert({s.video_id, static_cast<int>(s.split)});
  CHECK(before == after);

  for (const VideoSample& s : set.samples()) {
    const int lex_id = lexicon.find_gloss(set.vocabulary()[s.gloss_id]);
    if (lex_id >= 0) {
      CHECK(s.phoneme_labels == lexicon.sign(lex_id).phonemes);
      CHECK(s.labeled());
    } else {
      CHECK(!s.labeled());
    }
  }
}

TEST_CASE("fully covered metadata") {
  std::vector<MetadataEntry> entries;
  entries.push_back({"GLOSS0", {{"a", Split::Train, {}}, {"b", Split::Test, {}}}});
  entries.push_back({"GLOSS2", {{"c", Split::Val, {}}}});
  SampleSet set = join_datasets(entries, toy_lexicon_4_of_10());
  CHECK(set.coverage() == 1.0);
  const auto [with_p, without_p] = partition_by_coverage(set, Split::Test);
  CHECK(without_p.empty());
  CHECK(with_p.size() == 1);
}

TEST_CASE("partition is a disjoint exhaustive split") {
  SampleSet set = join_datasets(toy_metadata(), toy_lexicon_4_of_10());
  for (Split split : {Split::Train, Split::Val, Split::Test}) {
    const auto [with_p, without_p] = partition_by_coverage(set, split);
    CHECK(with_p.size() + without_p.size() == set.split_indices(split).size());
    for (int i : with_p) CHECK(set.samples()[i].labeled());
    for (int i : without_p) CHECK(!set.samples()[i].labeled());
  }
}

TEST_CASE("metadata JSON round trip and error paths") {
  TempDir dir;
  SUBCASE("round trip") {
    SampleSet set = join_datasets(toy_metadata(), toy_lexicon_4_of_10());
    const auto entries = metadata_from_sampleset(set);
    save_metadata(entries, dir.file("meta.json"));
    const auto reloaded = load_metadata(dir.file("meta.json"));
    REQUIRE(reloaded.size() == entries.size());
    for (std::size_t g = 0; g < entries.size(); ++g) {
      CHECK(reloaded[g].gloss == entries[g].gloss);
      REQUIRE(reloaded[g].instances.size() == entries[g].instances.size());
      for (std::size_t i = 0; i < entries[g].instances.size(); ++i) {
        CHECK(reloaded[g].instances[i].video_id == entries[g].instances[i].video_id);
        CHECK(reloaded[g].instances[i].split == entries[g].instances[i].split);
        CHECK(reloaded[g].instances[i].phonemes == entries[g].instances[i].phonemes);
      }
    }
  }
  SUBCASE("unknown split") {
    write_file(dir.file("bad.json"),
               R"([{"gloss":"a","instances":[{"video_id":"v","split":"dev"}]}])");
    CHECK_THROWS_AS(load_metadata(dir.file("bad.json")), DataError);
  }
  SUBCASE("empty list") {
    write_file(dir.file("empty.json"), "[]");
    CHECK_THROWS_AS(load_metadata(dir.file("empty.json")), DataError);
  }
  SUBCASE("not json") {
    write_file(dir.file("nope.json"), "gloss,t1");
    CHECK_THROWS_AS(load_metadata(dir.file("nope.json")), DataError);
  }
  SUBCASE("extra keys are tolerated") {
    write_file(dir.file("extra.json"),
               R"([{"gloss":"a","extra":1,"instances":[
                   {"video_id":"v","split":"train","fps":25,"bbox":[1,2]}]}])");
    const auto entries = load_metadata(dir.file("extra.json"));
    CHECK(entries.size() == 1);
    CHECK(entries[0].instances[0].split == Split::Train);
  }
}

TEST_CASE("synthetic generator determinism and masking") {
  SynthConfig config;
  config.glosses = 10;
  config.cardinalities = {3, 4, 3};
  config.videos_per_gloss = 20;  // 200 videos
  config.frames = 6;
  config.keypoints = 7;
  config.coverage = 0.5;
  config.noise_sigma = 0.1;
  config.seed = 99;

  SynthResult a = generate_synthetic(config);
  SynthResult b = generate_synthetic(config);

  SUBCASE("byte-identical across runs") {
    REQUIRE(a.raw_poses.size() == b.raw_poses.size());
    for (std::size_t i = 0; i < a.raw_poses.size(); ++i)
      CHECK(a.raw_poses[i].data == b.raw_poses[i].data);
    CHECK(a.manifest.labeled_count == b.manifest.labeled_count);
  }
  SUBCASE("exactly round(rho * N) labeled") {
    CHECK(a.manifest.labeled_count == 100);
    int labeled = 0;
    for (const auto& v : a.manifest.videos)
      if (v.labeled) ++labeled;
    CHECK(labeled == 100);
    CHECK(a.samples.coverage() == doctest::Approx(0.5));
  }
  SUBCASE("labels match the manifest tuples or are fully missing") {
    std::map<std::string, std::vector<int>> tuples(a.manifest.gloss_tuples.begin(),
                                                   a.manifest.gloss_tuples.end());
    for (std::size_t i = 0; i < a.samples.samples().size(); ++i) {
      const VideoSample& s = a.samples.samples()[i];
      if (s.labeled())
        CHECK(s.phoneme_labels == tuples.at(a.manifest.videos[i].gloss));
      else
        CHECK(s.phoneme_labels == std::vector<int>(3, kMissing));
    }
  }
  SUBCASE("splits are stratified per gloss") {
    std::map<std::string, std::map<int, int>> per_gloss;
    for (const auto& v : a.manifest.videos)
      per_gloss[v.gloss][static_cast<int>(v.split)]++;
    for (const auto& [gloss, counts] : per_gloss) {
      CHECK(counts.at(static_cast<int>(Split::Train)) == 14);
      CHECK(counts.at(static_cast<int>(Split::Val)) == 3);
      CHECK(counts.at(static_cast<int>(Split::Test)) == 3);
    }
  }
}

TEST_CASE("noise-free synthetic poses are deterministic per gloss") {
  SynthConfig config;
  config.glosses = 4;
  config.cardinalities = {2, 2, 2};
  config.videos_per_gloss = 3;
  config.frames = 5;
  config.keypoints = 6;
  config.noise_sigma = 0.0;
  config.coverage = 1.0;
  config.seed = 1;

  SynthResult r = generate_synthetic(config);
  const int vpg = config.videos_per_gloss;
  for (int g = 0; g < config.glosses; ++g)
    for (int v = 1; v < vpg; ++v)
      CHECK(r.raw_poses[g * vpg].data == r.raw_poses[g * vpg + v].data);
  // distinct tuples produce distinct poses
  for (int g = 1; g < config.glosses; ++g)
    CHECK(r.raw_poses[0].data != r.raw_poses[g * vpg].data);
}

TEST_CASE("nearest-centroid recovery of controlling phonemes at sigma=0") {
  SynthConfig config;
  config.glosses = 12;
  config.cardinalities = {4, 3, 4};
  config.videos_per_gloss = 4;
  config.frames = 8;
  config.keypoints = 8;
  config.noise_sigma = 0.0;
  config.coverage = 1.0;
  config.seed = 5;
  SynthResult r = generate_synthetic(config);

  const int moving = config.keypoints - kAnchorKeypoints;
  // feature extractors, independent of the generator internals:
  // handshape = time-averaged keypoint offsets from the moving centroid,
  // location = time-averaged moving centroid, movement = last-first centroid
  auto centroid = [&](const PoseSequence& p, int t) {
    std::vector<double> c(p.coords, 0.0);
    for (int k = kAnchorKeypoints; k < p.keypoints; ++k)
      for (int d = 0; d < p.coords; ++d) c[d] += p.at(t, k, d) / moving;
    return c;
  };
  auto feature = [&](const PoseSequence& p, int type) {
    std::vector<double> f;
    if (type == 0) {
      f.assign(static_cast<std::size_t>(moving) * p.coords, 0.0);
      for (int t = 0; t < p.frames; ++t) {
        const auto c = centroid(p, t);
        for (int k = 0; k < moving; ++k)
          for (int d = 0; d < p.coords; ++d)
            f[k * p.coords + d] +=
                (p.at(t, k + kAnchorKeypoints, d) - c[d]) / p.frames;
      }
    } else if (type == 1) {
      f.assign(p.coords, 0.0);
      for (int t = 0; t < p.frames; ++t) {
        const auto c = centroid(p, t);
        for (int d = 0; d < p.coords; ++d) f[d] += c[d] / p.frames;
      }
    } else {
      const auto first = centroid(p, 0);
      const auto last = centroid(p, p.frames - 1);
      for (int d = 0; d < p.coords; ++d) f.push_back(last[d] - first[d]);
    }
    return f;
  };

  std::map<std::string, std::vector<int>> tuples(r.manifest.gloss_tuples.begin(),
                                                 r.manifest.gloss_tuples.end());
  for (int type = 0; type < 3; ++type) {
    // class centroids from the raw poses
    std::map<int, std::pair<std::vector<double>, int>> sums;
    for (std::size_t i = 0; i < r.raw_poses.size(); ++i) {
      const int value = tuples.at(r.manifest.videos[i].gloss)[type];
      const auto f = feature(r.raw_poses[i], type);
      auto& [sum, count] = sums[value];
      if (sum.empty()) sum.assign(f.size(), 0.0);
      for (std::size_t d = 0; d < f.size(); ++d) sum[d] += f[d];
      ++count;
    }
    int correct = 0;
    for (std::size_t i = 0; i < r.raw_poses.size(); ++i) {
      const auto f = feature(r.raw_poses[i], type);
      int best_value = -1;
      double best_dist = 1e18;
      for (const auto& [value, sc] : sums) {
        double dist = 0.0;
        for (std::size_t d = 0; d < f.size(); ++d) {
          const double diff = f[d] - sc.first[d] / sc.second;
          dist += diff * diff;
        }
        if (dist < best_dist) {
          best_dist = dist;
          best_value = value;
        }
      }
      if (best_value == tuples.at(r.manifest.videos[i].gloss)[type]) ++correct;
    }
    CHECK(correct == static_cast<int>(r.raw_poses.size()));
  }
}

TEST_CASE("infeasible synthetic configs are rejected") {
  SynthConfig config;
  config.glosses = 50;
  config.cardinalities = {2, 2};  // product 4 < 50
  CHECK_THROWS_AS(generate_synthetic(config), DataError);

  SynthConfig bad = config;
  bad.cardinalities = {8, 8};
  bad.videos_per_gloss = 2;
  CHECK_THROWS_AS(generate_synthetic(bad), DataError);
}

TEST_CASE("collision rate reuses earlier tuples") {
  SynthConfig config;
  config.glosses = 10;
  config.cardinalities = {4, 4, 4};
  config.videos_per_gloss = 3;
  config.frames = 4;
  config.keypoints = 6;
  config.collision_rate = 0.3;
  config.seed = 11;
  SynthResult r = generate_synthetic(config);
  std::set<std::vector<int>> distinct;
  for (const auto& [gloss, tuple] : r.manifest.gloss_tuples) distinct.insert(tuple);
  CHECK(distinct.size() == 7);  // 10 - round(0.3 * 10)
}

TEST_CASE("dataset directory round trip") {
  TempDir dir;
  SynthConfig config;
  config.glosses = 5;
  config.cardinalities = {3, 3, 2};
  config.videos_per_gloss = 4;
  config.frames = 6;
  config.keypoints = 6;
  config.coverage = 0.5;
  config.seed = 77;
  SynthResult r = generate_synthetic(config);
  write_dataset(r, dir.file("data"));

  LoadedData loaded = load_data_dir(dir.file("data"));
  REQUIRE(loaded.samples.samples().size() == r.samples.samples().size());
  CHECK(loaded.samples.coverage() == r.samples.coverage());
  CHECK(loaded.lexicon.inventory() == r.lexicon.inventory());
  for (std::size_t i = 0; i < loaded.samples.samples().size(); ++i) {
    const VideoSample& a = loaded.samples.samples()[i];
    const VideoSample& b = r.samples.samples()[i];
    CHECK(a.video_id == b.video_id);
    CHECK(a.split == b.split);
    CHECK(a.phoneme_labels == b.phoneme_labels);
    REQUIRE(a.pose.has_value());
    // loading normalizes, so loaded poses equal the in-memory normalized ones
    CHECK(a.pose->data == b.pose->data);
  }

  SynthManifest manifest = load_manifest(dir.file("data") + "/manifest.json");
  CHECK(manifest.labeled_count == r.manifest.labeled_count);
  CHECK(manifest.gloss_tuples == r.manifest.gloss_tuples);
}
