#include "signrec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "signrec/errors.hpp"
#include "signrec/rng.hpp"

namespace signrec {

namespace {

std::string zero_pad(int value, int width) {
  std::ostringstream ss;
  ss << value;
  std::string s = ss.str();
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

int digits(int n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

void validate_config(const SynthConfig& c) {
  if (c.glosses < 2) throw DataError("synthetic config needs >= 2 glosses");
  if (c.cardinalities.empty()) throw DataError("synthetic config needs >= 1 phoneme type");
  for (int card : c.cardinalities)
    if (card < 2) throw DataError("phoneme cardinalities must be >= 2");
  if (c.videos_per_gloss < 3)
    throw DataError("synthetic config needs >= 3 videos per gloss");
  if (c.coverage < 0.0 || c.coverage > 1.0)
    throw DataError("coverage must be in [0, 1]");
  if (c.collision_rate < 0.0 || c.collision_rate > 1.0)
    throw DataError("collision rate must be in [0, 1]");
  if (c.frames < 2) throw DataError("synthetic clips need >= 2 frames");
  if (c.keypoints < kAnchorKeypoints + 1)
    throw DataError("synthetic config needs > " + std::to_string(kAnchorKeypoints) +
                    " keypoints");
  if (c.coords != 2 && c.coords != 3) throw DataError("coords must be 2 or 3");
  if (c.noise_sigma < 0.0) throw DataError("noise sigma must be >= 0");
}

// Distinct tuples, deterministically. Enumerates when the product space is
// small, rejection-samples otherwise.
std::vector<std::vector<int>> draw_distinct_tuples(const std::vector<int>& cards,
                                                   int count, Rng& rng) {
  double product = 1.0;
  for (int card : cards) product *= card;
  if (product < static_cast<double>(count))
    throw DataError("infeasible config: " + std::to_string(count) +
                    " distinct tuples demanded but the inventory product is " +
                    std::to_string(static_cast<long long>(product)));

  if (product <= 1e6) {
    std::vector<std::vector<int>> space;
    std::vector<int> tuple(cards.size(), 0);
    while (true) {
      space.push_back(tuple);
      int t = static_cast<int>(cards.size()) - 1;
      while (t >= 0 && tuple[t] == cards[t] - 1) tuple[t--] = 0;
      if (t < 0) break;
      ++tuple[t];
    }
    rng.shuffle(space);
    space.resize(count);
    return space;
  }

  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> out;
  while (static_cast<int>(out.size()) < count) {
    std::vector<int> tuple(cards.size());
    for (std::size_t t = 0; t < cards.size(); ++t)
      tuple[t] = static_cast<int>(rng.uniform_int(cards[t]));
    if (seen.insert(tuple).second) out.push_back(std::move(tuple));
  }
  return out;
}

struct PoseLayout {
  // per handshape value: zero-mean offset per moving keypoint, [value][k][c]
  std::vector<std::vector<std::vector<double>>> hand_offsets;
  std::vector<std::vector<double>> location_centers;     // [value][c]
  std::vector<std::vector<double>> movement_directions;  // [value][c]
  std::vector<std::vector<double>> anchors;              // [k][c]
};

PoseLayout build_layout(const SynthConfig& c) {
  PoseLayout layout;
  const int moving = c.keypoints - kAnchorKeypoints;
  const int hand_card = c.cardinalities[0];
  const int loc_card = c.cardinalities.size() > 1 ? c.cardinalities[1] : 0;
  const int mov_card = c.cardinalities.size() > 2 ? c.cardinalities[2] : 0;

  layout.hand_offsets.resize(hand_card);
  for (int h = 0; h < hand_card; ++h) {
    Rng rng(mix_seed(c.seed, 1000 + h));
    auto& offs = layout.hand_offsets[h];
    offs.assign(moving, std::vector<double>(c.coords, 0.0));
    std::vector<double> mean(c.coords, 0.0);
    for (int k = 0; k < moving; ++k) {
      const double angle = 2.0 * M_PI * rng.uniform();
      const double radius = 0.18 * (0.5 + 0.5 * rng.uniform());
      offs[k][0] = radius * std::cos(angle);
      offs[k][1] = radius * std::sin(angle);
      if (c.coords == 3) offs[k][2] = 0.18 * (rng.uniform() - 0.5);
      for (int d = 0; d < c.coords; ++d) mean[d] += offs[k][d] / moving;
    }
    // zero-mean so the pattern never moves the hand centroid
    for (int k = 0; k < moving; ++k)
      for (int d = 0; d < c.coords; ++d) offs[k][d] -= mean[d];
  }

  for (int l = 0; l < loc_card; ++l) {
    const double angle = 2.0 * M_PI * l / loc_card;
    std::vector<double> center = {0.45 * std::cos(angle), 0.45 * std::sin(angle)};
    if (c.coords == 3) center.push_back(0.25 * std::sin(2.0 * angle));
    layout.location_centers.push_back(std::move(center));
  }

  for (int m = 0; m < mov_card; ++m) {
    const double angle = 2.0 * M_PI * m / mov_card;
    std::vector<double> dir = {0.35 * std::cos(angle), 0.35 * std::sin(angle)};
    if (c.coords == 3) dir.push_back(0.0);
    layout.movement_directions.push_back(std::move(dir));
  }

  const double ax = 0.7, ay = 0.95;
  layout.anchors = {{-ax, -ay}, {ax, -ay}, {-ax, ay}, {ax, ay}};
  if (c.coords == 3)
    for (auto& a : layout.anchors) a.push_back(0.0);
  return layout;
}

PoseSequence compose_pose(const SynthConfig& c, const PoseLayout& layout,
                          const std::vector<int>& tuple, Rng& noise_rng) {
  PoseSequence pose;
  pose.frames = c.frames;
  pose.keypoints = c.keypoints;
  pose.coords = c.coords;
  pose.fps = c.fps;
  pose.data.resize(static_cast<std::size_t>(c.frames) * c.keypoints * c.coords);

  const auto& offsets = layout.hand_offsets[tuple[0]];
  const std::vector<double>* center =
      tuple.size() > 1 && !layout.location_centers.empty()
          ? &layout.location_centers[tuple[1]]
          : nullptr;
  const std::vector<double>* direction =
      tuple.size() > 2 && !layout.movement_directions.empty()
          ? &layout.movement_directions[tuple[2]]
          : nullptr;

  for (int t = 0; t < c.frames; ++t) {
    const double u = static_cast<double>(t) / (c.frames - 1);
    for (int k = 0; k < c.keypoints; ++k) {
      for (int d = 0; d < c.coords; ++d) {
        double v;
        if (k < kAnchorKeypoints) {
          v = layout.anchors[k][d];
        } else {
          v = offsets[k - kAnchorKeypoints][d];
          if (center) v += (*center)[d];
          if (direction) v += (u - 0.5) * (*direction)[d];
        }
        if (c.noise_sigma > 0.0) v += c.noise_sigma * noise_rng.gaussian();
        pose.at(t, k, d) = static_cast<float>(v);
      }
    }
  }
  return pose;
}

}  // namespace

SynthResult generate_synthetic(const SynthConfig& config) {
  validate_config(config);
  const int M = static_cast<int>(config.cardinalities.size());

  // lexicon: glosses g000.. with tuples over the configured types
  const int collide = static_cast<int>(
      std::lround(config.collision_rate * config.glosses));
  const int distinct = config.glosses - collide;
  Rng tuple_rng(mix_seed(config.seed, 1));
  std::vector<std::vector<int>> tuples =
      draw_distinct_tuples(config.cardinalities, distinct, tuple_rng);
  for (int g = distinct; g < config.glosses; ++g)
    tuples.push_back(tuples[tuple_rng.uniform_int(distinct)]);

  std::vector<PhonemeType> types(M);
  const char* canonical[3] = {"handshape", "location", "movement"};
  for (int t = 0; t < M; ++t) {
    types[t].id = t;
    types[t].name = t < 3 ? canonical[t] : "type" + std::to_string(t);
    const int pad = digits(config.cardinalities[t] - 1);
    for (int v = 0; v < config.cardinalities[t]; ++v)
      types[t].value_names.push_back("v" + zero_pad(v, std::max(2, pad)));
  }
  PhonemeInventory inventory(std::move(types));

  const int gloss_pad = std::max(3, digits(config.glosses - 1));
  std::vector<Sign> signs(config.glosses);
  for (int g = 0; g < config.glosses; ++g) {
    signs[g].gloss = "g" + zero_pad(g, gloss_pad);
    signs[g].phonemes = tuples[g];
  }
  Lexicon lexicon(inventory, std::move(signs));

  // splits per gloss: ~70/15/15 with at least one val and test video
  const int vpg = config.videos_per_gloss;
  const int n_val = std::max(1, static_cast<int>(std::lround(0.15 * vpg)));
  const int n_test = std::max(1, static_cast<int>(std::lround(0.15 * vpg)));
  if (vpg - n_val - n_test < 1)
    throw DataError("infeasible config: no train videos per gloss");

  // label mask: exactly round(coverage * N) videos keep labels
  const int total_videos = config.glosses * vpg;
  const int labeled_count =
      static_cast<int>(std::lround(config.coverage * total_videos));
  std::vector<int> order(total_videos);
  for (int i = 0; i < total_videos; ++i) order[i] = i;
  Rng mask_rng(mix_seed(config.seed, 3));
  mask_rng.shuffle(order);
  std::vector<char> labeled(total_videos, 0);
  for (int i = 0; i < labeled_count; ++i) labeled[order[i]] = 1;

  const PoseLayout layout = build_layout(config);
  Rng noise_rng(mix_seed(config.seed, 2));
  const int video_pad = std::max(2, digits(vpg - 1));
  const std::vector<int> all_missing(M, kMissing);

  SynthResult result;
  result.lexicon = lexicon;
  result.manifest.config = config;
  result.manifest.labeled_count = labeled_count;
  for (int g = 0; g < config.glosses; ++g)
    result.manifest.gloss_tuples.emplace_back(lexicon.sign(g).gloss, tuples[g]);

  std::vector<std::string> vocabulary;
  for (int g = 0; g < config.glosses; ++g) vocabulary.push_back(lexicon.sign(g).gloss);

  std::vector<VideoSample> samples;
  for (int g = 0; g < config.glosses; ++g) {
    for (int j = 0; j < vpg; ++j) {
      const int index = g * vpg + j;
      VideoSample sample;
      sample.video_id = lexicon.sign(g).gloss + "_" + zero_pad(j, video_pad);
      sample.gloss_id = g;
      sample.split = j < vpg - n_val - n_test ? Split::Train
                     : j < vpg - n_test       ? Split::Val
                                              : Split::Test;
      sample.phoneme_labels = labeled[index] ? tuples[g] : all_missing;

      PoseSequence raw = compose_pose(config, layout, tuples[g], noise_rng);
      result.raw_poses.push_back(raw);
      normalize_clip(raw);
      sample.pose = std::move(raw);

      result.manifest.videos.push_back({sample.video_id, lexicon.sign(g).gloss,
                                        sample.split, labeled[index] != 0});
      samples.push_back(std::move(sample));
    }
  }
  result.samples = SampleSet(std::move(vocabulary), inventory, std::move(samples));
  return result;
}

void save_manifest(const SynthManifest& manifest, const std::string& path) {
  nlohmann::json j;
  const SynthConfig& c = manifest.config;
  j["config"] = {{"glosses", c.glosses},
                 {"cardinalities", c.cardinalities},
                 {"videos_per_gloss", c.videos_per_gloss},
                 {"frames", c.frames},
                 {"keypoints", c.keypoints},
                 {"coords", c.coords},
                 {"noise_sigma", c.noise_sigma},
                 {"coverage", c.coverage},
                 {"collision_rate", c.collision_rate},
                 {"fps", c.fps},
                 {"seed", c.seed}};
  j["labeled_count"] = manifest.labeled_count;
  nlohmann::json tuples = nlohmann::json::object();
  for (const auto& [gloss, tuple] : manifest.gloss_tuples) tuples[gloss] = tuple;
  j["gloss_tuples"] = std::move(tuples);
  nlohmann::json videos = nlohmann::json::array();
  for (const SynthVideoRecord& v : manifest.videos)
    videos.push_back({{"video_id", v.video_id},
                      {"gloss", v.gloss},
                      {"split", split_name(v.split)},
                      {"labeled", v.labeled}});
  j["videos"] = std::move(videos);

  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest: " + path);
  out << j.dump(1) << "\n";
}

SynthManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest " + path + ": " + e.what());
  }
  SynthManifest m;
  try {
    const auto& jc = j.at("config");
    m.config.glosses = jc.at("glosses").get<int>();
    m.config.cardinalities = jc.at("cardinalities").get<std::vector<int>>();
    m.config.videos_per_gloss = jc.at("videos_per_gloss").get<int>();
    m.config.frames = jc.at("frames").get<int>();
    m.config.keypoints = jc.at("keypoints").get<int>();
    m.config.coords = jc.at("coords").get<int>();
    m.config.noise_sigma = jc.at("noise_sigma").get<double>();
    m.config.coverage = jc.at("coverage").get<double>();
    m.config.collision_rate = jc.at("collision_rate").get<double>();
    m.config.fps = jc.at("fps").get<float>();
    m.config.seed = jc.at("seed").get<std::uint64_t>();
    m.labeled_count = j.at("labeled_count").get<int>();
    for (const auto& [gloss, tuple] : j.at("gloss_tuples").items())
      m.gloss_tuples.emplace_back(gloss, tuple.get<std::vector<int>>());
    for (const auto& jv : j.at("videos"))
      m.videos.push_back({jv.at("video_id").get<std::string>(),
                          jv.at("gloss").get<std::string>(),
                          parse_split(jv.at("split").get<std::string>()),
                          jv.at("labeled").get<bool>()});
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest " + path + ": " + e.what());
  }
  return m;
}

}  // namespace signrec
