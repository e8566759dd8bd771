#pragma once

#include <iosfwd>
#include <vector>

#include "signrec/dataset.hpp"
#include "signrec/metrics.hpp"
#include "signrec/model.hpp"

namespace signrec {

// Model input for one clip: the normalized pose resampled to t_model frames,
// one row per frame, keypoints*coords columns.
Eigen::MatrixXf sample_features(const PoseSequence& pose, int t_model);

// Features for every sample in the set, indexed like set.samples().
struct FeatureSet {
  std::vector<Eigen::MatrixXf> features;
  int input_dim = 0;
};

FeatureSet build_features(const SampleSet& set, int t_model);

// Head 0 is the gloss head; one head per subset member follows, ascending.
std::vector<HeadSpec> make_head_specs(const SampleSet& set,
                                      const PhonemeSubset& subset);

Batch make_batch(const SampleSet& set, const FeatureSet& features,
                 const std::vector<int>& indices, const PhonemeSubset& subset);

struct EpochLog {
  int epoch = 0;
  LossBreakdown loss;
  double val_accuracy = 0.0;
  double elapsed_seconds = 0.0;
};

struct TrainResult {
  ModelParameters params;  // checkpoint with the best validation accuracy
  std::vector<HeadSpec> heads;
  PhonemeSubset subset;
  double best_val_accuracy = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
  std::vector<EpochLog> log;
};

// Mini-batch training with early stopping on validation top-1 gloss accuracy
// (patience from the config, ties keep the earlier checkpoint). Deterministic
// given config.seed. Throws NumericError on divergence. When log_stream is
// given, one JSON line is written per epoch.
TrainResult train(const ModelConfig& config, const SampleSet& set,
                  const PhonemeSubset& subset,
                  const FeatureSet* features = nullptr,
                  std::ostream* log_stream = nullptr);

struct Prediction {
  std::vector<double> gloss_scores;  // softmax over the vocabulary
  std::vector<int> phoneme_argmax;   // per active phoneme head
};

Prediction predict_sample(const ModelParameters& params, const Eigen::MatrixXf& x);

std::vector<Prediction> predict(const ModelParameters& params,
                                const SampleSet& set, const FeatureSet& features,
                                const std::vector<int>& indices);

// Recognition metrics on one split, split three ways by label coverage, plus
// per-head phoneme accuracy over labeled samples and majority baselines.
EvalReport evaluate(const ModelParameters& params, const SampleSet& set,
                    const FeatureSet& features, const PhonemeSubset& subset,
                    Split split);

struct ProbeResult {
  Eigen::MatrixXf head_w;  // embed_dim x cardinality
  Eigen::VectorXf head_b;
  double test_accuracy = 0.0;
  int train_count = 0;
  int test_count = 0;
};

// Trains a single linear head for one phoneme type on the frozen encoder's
// embeddings (labeled samples only).
ProbeResult linear_probe(const ModelParameters& frozen, const SampleSet& set,
                         const FeatureSet& features, int phoneme_type,
                         std::uint64_t seed = 0);

}  // namespace signrec
