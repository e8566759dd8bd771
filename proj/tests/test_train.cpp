#include <doctest.h>

#include <cmath>

#include "signrec/errors.hpp"
#include "signrec/rng.hpp"
#include "signrec/synthetic.hpp"
#include "signrec/train.hpp"
#include "test_helpers.hpp"

using namespace signrec;

namespace {

SynthConfig small_synth(double sigma, std::uint64_t seed = 3) {
  SynthConfig c;
  c.glosses = 6;
  c.cardinalities = {3, 3, 2};
  c.videos_per_gloss = 6;
  c.frames = 10;
  c.keypoints = 8;
  c.noise_sigma = sigma;
  c.coverage = 1.0;
  c.seed = seed;
  return c;
}

ModelConfig small_model(std::uint64_t seed = 0) {
  ModelConfig c;
  c.t_model = 10;
  c.embed_dim = 24;
  c.batch_size = 16;
  c.max_epochs = 150;
  c.patience = 30;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("training on separable data reaches perfect train accuracy") {
  SynthResult data = generate_synthetic(small_synth(0.0));
  TrainResult r = train(small_model(), data.samples, PhonemeSubset());
  const FeatureSet features = build_features(data.samples, 10);
  EvalReport train_eval =
      evaluate(r.params, data.samples, features, PhonemeSubset(), Split::Train);
  CHECK(train_eval.all.a1 == 1.0);
  CHECK(r.best_val_accuracy > 0.99);
}

TEST_CASE("patience: flat validation accuracy stops training after e + patience epochs") {
  // single-gloss vocabulary makes validation accuracy 1.0 from epoch 1 on
  std::vector<PhonemeType> types(1);
  types[0].id = 0;
  types[0].name = "t0";
  types[0].value_names = {"va", "vb"};
  PhonemeInventory inv(std::move(types));

  Rng rng(4);
  std::vector<VideoSample> samples;
  for (int i = 0; i < 8; ++i) {
    VideoSample s;
    s.video_id = "v" + std::to_string(i);
    s.gloss_id = 0;
    s.split = i < 5 ? Split::Train : (i < 7 ? Split::Val : Split::Test);
    s.phoneme_labels = {kMissing};
    PoseSequence pose;
    pose.frames = 4;
    pose.keypoints = 2;
    pose.coords = 2;
    pose.data.resize(16);
    for (float& v : pose.data) v = static_cast<float>(rng.gaussian());
    s.pose = pose;
    samples.push_back(std::move(s));
  }
  SampleSet set({"only"}, inv, std::move(samples));

  ModelConfig config = small_model();
  config.t_model = 4;
  config.embed_dim = 4;
  config.max_epochs = 100;
  config.patience = 30;
  TrainResult r = train(config, set, PhonemeSubset());
  CHECK(r.best_epoch == 1);
  CHECK(r.epochs_run == 31);  // stopped at epoch 1 + 30
  CHECK(static_cast<int>(r.log.size()) == 31);
}

TEST_CASE("training is deterministic given the seed") {
  SynthResult data = generate_synthetic(small_synth(0.1));
  ModelConfig config = small_model(9);
  config.max_epochs = 12;
  config.patience = 30;
  PhonemeSubset subset({0, 1});

  TrainResult a = train(config, data.samples, subset);
  TrainResult b = train(config, data.samples, subset);
  CHECK(a.epochs_run == b.epochs_run);
  CHECK(a.best_val_accuracy == b.best_val_accuracy);
  auto ta = a.params.tensors(), tb = b.params.tensors();
  for (std::size_t i = 0; i < ta.size(); ++i)
    CHECK((*ta[i] - *tb[i]).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("training log has one entry per epoch with finite losses") {
  SynthResult data = generate_synthetic(small_synth(0.1));
  ModelConfig config = small_model();
  config.max_epochs = 5;
  std::ostringstream log;
  TrainResult r = train(config, data.samples, PhonemeSubset({0}), nullptr, &log);
  CHECK(r.log.size() == 5);
  for (const EpochLog& e : r.log) {
    CHECK(std::isfinite(e.loss.total));
    CHECK(e.loss.total >= e.loss.gloss_loss - 1e-12);
  }
  // one JSON line per epoch
  int lines = 0;
  std::string line;
  std::istringstream in(log.str());
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 5);
}

TEST_CASE("divergence aborts with a numeric error") {
  SynthResult data = generate_synthetic(small_synth(0.1));
  ModelConfig config = small_model();
  config.learning_rate = 1e30;
  config.max_epochs = 10;
  CHECK_THROWS_AS(train(config, data.samples, PhonemeSubset()), NumericError);
}

TEST_CASE("single-gloss vocabulary gives trivial perfect top-1") {
  std::vector<PhonemeType> types(1);
  types[0].id = 0;
  types[0].name = "t0";
  types[0].value_names = {"va", "vb"};
  PhonemeInventory inv(std::move(types));
  Rng rng(6);
  std::vector<VideoSample> samples;
  for (int i = 0; i < 9; ++i) {
    VideoSample s;
    s.video_id = "v" + std::to_string(i);
    s.gloss_id = 0;
    s.split = i < 5 ? Split::Train : (i < 7 ? Split::Val : Split::Test);
    s.phoneme_labels = {kMissing};
    PoseSequence pose;
    pose.frames = 4;
    pose.keypoints = 2;
    pose.coords = 2;
    pose.data.resize(16);
    for (float& v : pose.data) v = static_cast<float>(rng.gaussian());
    s.pose = pose;
    samples.push_back(std::move(s));
  }
  SampleSet set({"only"}, inv, std::move(samples));
  ModelConfig config = small_model();
  config.t_model = 4;
  config.embed_dim = 4;
  config.max_epochs = 3;
  TrainResult r = train(config, set, PhonemeSubset());
  const FeatureSet features = build_features(set, 4);
  CHECK(evaluate(r.params, set, features, PhonemeSubset(), Split::Test).all.a1 == 1.0);
}

TEST_CASE("predicted scores are softmax-monotone in logits") {
  SynthResult data = generate_synthetic(small_synth(0.1));
  const FeatureSet features = build_features(data.samples, 10);
  auto params = ModelParameters::init(features.input_dim, 16,
                                      Pooling::TemporalAttention, {6, 3}, 5);
  const Prediction pred = predict_sample(params, features.features[0]);
  const auto fwd = forward_sample(params, features.features[0]);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (fwd.logits[0][i] > fwd.logits[0][j])
        CHECK(pred.gloss_scores[i] > pred.gloss_scores[j]);
  double sum = 0.0;
  for (double s : pred.gloss_scores) sum += s;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("noise-free synthetic phoneme predictions match the manifest") {
  SynthResult data = generate_synthetic(small_synth(0.0));
  ModelConfig config = small_model();
  PhonemeSubset subset({0, 1, 2});
  TrainResult r = train(config, data.samples, subset);
  const FeatureSet features = build_features(data.samples, 10);
  EvalReport e = evaluate(r.params, data.samples, features, subset, Split::Test);
  for (double acc : e.phoneme_accuracy) CHECK(acc == 1.0);
}

TEST_CASE("linear probe on one-hot embeddings is perfect") {
  // encoder wired to pass a one-hot phoneme indicator straight through:
  // x is constant over time, proj/h1/h2 are identity blocks
  const int classes = 3;
  std::vector<PhonemeType> types(1);
  types[0].id = 0;
  types[0].name = "t0";
  types[0].value_names = {"va", "vb", "vc"};
  PhonemeInventory inv(std::move(types));

  std::vector<VideoSample> samples;
  for (int i = 0; i < 12; ++i) {
    const int value = i % classes;
    VideoSample s;
    s.video_id = "v" + std::to_string(i);
    s.gloss_id = 0;
    s.split = i < 6 ? Split::Train : Split::Test;
    s.phoneme_labels = {value};
    PoseSequence pose;
    pose.frames = 2;
    pose.keypoints = classes;
    pose.coords = 1;  // invalid C rejected by pose io, but features accept it
    pose.coords = 2;
    pose.data.assign(2 * classes * 2, 0.0f);
    pose.at(0, value, 0) = 1.0f;
    pose.at(1, value, 0) = 1.0f;
    s.pose = pose;
    samples.push_back(std::move(s));
  }
  SampleSet set({"g"}, inv, std::move(samples));

  const int dim = classes * 2;
  auto frozen = ModelParameters::zeros(dim, dim, Pooling::Mean, {1});
  frozen.proj_w = Eigen::MatrixXf::Identity(dim, dim);
  frozen.h1_w = Eigen::MatrixXf::Identity(dim, dim);
  frozen.h2_w = Eigen::MatrixXf::Identity(dim, dim);

  const FeatureSet features = build_features(set, 2);
  ProbeResult probe = linear_probe(frozen, set, features, 0);
  CHECK(probe.test_accuracy == 1.0);
  CHECK(probe.train_count == 6);
  CHECK(probe.test_count == 6);
}

TEST_CASE("probe beats majority and the full model beats the probe on noisy data") {
  SynthConfig sc = small_synth(0.35, 12);
  sc.glosses = 10;
  sc.cardinalities = {4, 3, 3};
  sc.videos_per_gloss = 8;
  sc.coverage = 0.6;
  SynthResult data = generate_synthetic(sc);

  ModelConfig config = small_model(2);
  config.max_epochs = 80;
  TrainResult baseline = train(config, data.samples, PhonemeSubset());
  TrainResult full = train(config, data.samples, PhonemeSubset({0, 1, 2}));

  const FeatureSet features = build_features(data.samples, config.t_model);
  EvalReport full_eval =
      evaluate(full.params, data.samples, features, full.subset, Split::Test);

  // directional ordering on the handshape head (type 0)
  const double majority = majority_baseline(data.samples, 0).accuracy;
  const double probe =
      linear_probe(baseline.params, data.samples, features, 0).test_accuracy;
  const double full_acc = full_eval.phoneme_accuracy[0];
  CHECK(probe >= majority);
  CHECK(full_acc + 0.05 >= probe);
  CHECK(full_acc > majority);
}

TEST_CASE("linear probe requires labeled training samples") {
  SynthConfig sc = small_synth(0.1);
  sc.coverage = 0.0;
  SynthResult data = generate_synthetic(sc);
  const FeatureSet features = build_features(data.samples, 10);
  auto frozen = ModelParameters::init(features.input_dim, 8, Pooling::Mean, {6}, 1);
  CHECK_THROWS_AS(linear_probe(frozen, data.samples, features, 0), DataError);
}
