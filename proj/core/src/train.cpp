#include "signrec/train.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "signrec/errors.hpp"

namespace signrec {

Eigen::MatrixXf sample_features(const PoseSequence& pose, int t_model) {
  const PoseSequence r = resample(pose, t_model);
  const int dim = r.keypoints * r.coords;
  Eigen::MatrixXf x(t_model, dim);
  for (int t = 0; t < t_model; ++t)
    for (int i = 0; i < dim; ++i)
      x(t, i) = r.data[static_cast<std::size_t>(t) * dim + i];
  return x;
}

FeatureSet build_features(const SampleSet& set, int t_model) {
  FeatureSet out;
  out.features.reserve(set.samples().size());
  for (const VideoSample& s : set.samples()) {
    if (!s.pose)
      throw DataError("sample '" + s.video_id + "' has no pose loaded");
    out.features.push_back(sample_features(*s.pose, t_model));
  }
  if (!out.features.empty())
    out.input_dim = static_cast<int>(out.features.front().cols());
  for (const auto& f : out.features)
    if (f.cols() != out.input_dim)
      throw DataError("inconsistent keypoint/coord shape across samples");
  return out;
}

std::vector<HeadSpec> make_head_specs(const SampleSet& set,
                                      const PhonemeSubset& subset) {
  std::vector<HeadSpec> heads;
  heads.push_back({"gloss", set.vocabulary_size()});
  for (int t : subset)
    heads.push_back({set.inventory().type(t).name,
                     set.inventory().type(t).cardinality()});
  return heads;
}

Batch make_batch(const SampleSet& set, const FeatureSet& features,
                 const std::vector<int>& indices, const PhonemeSubset& subset) {
  Batch batch;
  batch.inputs.reserve(indices.size());
  for (int i : indices) {
    const VideoSample& s = set.samples()[i];
    batch.inputs.push_back(features.features[i]);
    batch.gloss_labels.push_back(s.gloss_id);
    std::vector<int> labels;
    labels.reserve(subset.size());
    for (int t : subset) labels.push_back(s.phoneme_labels[t]);
    batch.phoneme_labels.push_back(std::move(labels));
  }
  return batch;
}

namespace {

double gloss_accuracy(const ModelParameters& params, const SampleSet& set,
                      const FeatureSet& features, const std::vector<int>& indices) {
  if (indices.empty()) return 0.0;
  int correct = 0;
  for (int i : indices) {
    const auto fwd = forward_sample(params, features.features[i]);
    Eigen::Index argmax;
    fwd.logits[0].maxCoeff(&argmax);
    if (static_cast<int>(argmax) == set.samples()[i].gloss_id) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

void write_epoch_json(std::ostream& out, const EpochLog& entry,
                      const std::vector<HeadSpec>& heads) {
  nlohmann::json j;
  j["epoch"] = entry.epoch;
  j["total_loss"] = entry.loss.total;
  j["gloss_loss"] = entry.loss.gloss_loss;
  nlohmann::json ph = nlohmann::json::object();
  for (std::size_t h = 1; h < heads.size(); ++h)
    ph[heads[h].name] = entry.loss.phoneme_losses[h - 1];
  j["phoneme_losses"] = std::move(ph);
  j["val_a1"] = entry.val_accuracy;
  j["elapsed"] = entry.elapsed_seconds;
  out << j.dump() << "\n";
}

}  // namespace

TrainResult train(const ModelConfig& config, const SampleSet& set,
                  const PhonemeSubset& subset, const FeatureSet* features,
                  std::ostream* log_stream) {
  FeatureSet local;
  if (!features) {
    local = build_features(set, config.t_model);
    features = &local;
  }
  const std::vector<int> train_idx = set.split_indices(Split::Train);
  const std::vector<int> val_idx = set.split_indices(Split::Val);
  if (train_idx.empty()) throw DataError("training split is empty");
  if (val_idx.empty()) throw DataError("validation split is empty");

  TrainResult result;
  result.subset = subset;
  result.heads = make_head_specs(set, subset);
  std::vector<int> head_sizes;
  for (const HeadSpec& h : result.heads) head_sizes.push_back(h.size);

  ModelParameters params = ModelParameters::init(
      features->input_dim, config.embed_dim, config.pooling, head_sizes, config.seed);
  AdamState<float> adam(params);
  const std::vector<double> weights =
      resolve_weights(config.loss_weights, subset.size());

  Rng shuffle_rng(mix_seed(config.seed, 0x50f1));
  std::vector<int> order = train_idx;
  int epochs_since_improvement = 0;
  const auto started = std::chrono::steady_clock::now();

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);

    LossBreakdown epoch_loss;
    epoch_loss.phoneme_losses.assign(subset.size(), 0.0);
    epoch_loss.labeled_counts.assign(subset.size(), 0);
    int batches = 0;

    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::vector<int> batch_idx(order.begin() + start, order.begin() + end);
      const Batch batch = make_batch(set, *features, batch_idx, subset);

      const auto fwd = forward(params, batch);
      const LossBreakdown loss = compute_loss(params, fwd, batch, weights);
      if (!std::isfinite(loss.total))
        throw NumericError("training diverged: non-finite loss at epoch " +
                           std::to_string(epoch));
      ModelParameters grads = backward(params, batch, fwd, weights);
      adam.update(params, grads, config);

      epoch_loss.total += loss.total;
      epoch_loss.gloss_loss += loss.gloss_loss;
      for (std::size_t h = 0; h < loss.phoneme_losses.size(); ++h) {
        epoch_loss.phoneme_losses[h] += loss.phoneme_losses[h];
        epoch_loss.labeled_counts[h] += loss.labeled_counts[h];
      }
      ++batches;
    }
    epoch_loss.total /= batches;
    epoch_loss.gloss_loss /= batches;
    for (double& l : epoch_loss.phoneme_losses) l /= batches;
    epoch_loss.gloss_count = static_cast<int>(order.size());

    EpochLog entry;
    entry.epoch = epoch;
    entry.loss = epoch_loss;
    entry.val_accuracy = gloss_accuracy(params, set, *features, val_idx);
    entry.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    result.log.push_back(entry);
    if (log_stream) write_epoch_json(*log_stream, entry, result.heads);

    // strict improvement only: ties keep the earlier checkpoint
    if (result.best_epoch == 0 || entry.val_accuracy > result.best_val_accuracy) {
      result.best_val_accuracy = entry.val_accuracy;
      result.best_epoch = epoch;
      result.params = params;
      epochs_since_improvement = 0;
    } else {
      ++epochs_since_improvement;
    }
    result.epochs_run = epoch;
    if (epochs_since_improvement >= config.patience) break;
  }
  if (!result.params.all_finite())
    throw NumericError("training produced non-finite parameters");
  return result;
}

Prediction predict_sample(const ModelParameters& params, const Eigen::MatrixXf& x) {
  const auto fwd = forward_sample(params, x);
  Prediction pred;
  const Eigen::VectorXf probs = softmax<float>(fwd.logits[0]);
  pred.gloss_scores.assign(probs.data(), probs.data() + probs.size());
  for (int h = 1; h < params.head_count(); ++h) {
    Eigen::Index argmax;
    fwd.logits[h].maxCoeff(&argmax);
    pred.phoneme_argmax.push_back(static_cast<int>(argmax));
  }
  return pred;
}

std::vector<Prediction> predict(const ModelParameters& params,
                                const SampleSet& set, const FeatureSet& features,
                                const std::vector<int>& indices) {
  (void)set;
  std::vector<Prediction> out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(predict_sample(params, features.features[i]));
  return out;
}

EvalReport evaluate(const ModelParameters& params, const SampleSet& set,
                    const FeatureSet& features, const PhonemeSubset& subset,
                    Split split) {
  EvalReport report;
  const auto [with_idx, without_idx] = partition_by_coverage(set, split);

  auto rank_predictions = [&](const std::vector<int>& indices,
                              std::vector<Prediction>* keep = nullptr) {
    std::vector<RankedPrediction> ranked;
    for (int i : indices) {
      Prediction p = predict_sample(params, features.features[i]);
      ranked.push_back({p.gloss_scores, set.samples()[i].gloss_id});
      if (keep) keep->push_back(std::move(p));
    }
    return ranked;
  };

  std::vector<Prediction> with_preds;
  const auto ranked_with = rank_predictions(with_idx, &with_preds);
  const auto ranked_without = rank_predictions(without_idx);
  std::vector<RankedPrediction> ranked_all = ranked_with;
  ranked_all.insert(ranked_all.end(), ranked_without.begin(), ranked_without.end());

  report.with_labels = metric_triple(ranked_with);
  report.without_labels = metric_triple(ranked_without);
  report.all = metric_triple(ranked_all);

  const auto heads = make_head_specs(set, subset);
  for (std::size_t h = 1; h < heads.size(); ++h) {
    const int type = subset.ids()[h - 1];
    int correct = 0, counted = 0;
    for (std::size_t j = 0; j < with_idx.size(); ++j) {
      const int label = set.samples()[with_idx[j]].phoneme_labels[type];
      if (label == kMissing) continue;
      ++counted;
      if (with_preds[j].phoneme_argmax[h - 1] == label) ++correct;
    }
    report.head_names.push_back(heads[h].name);
    report.phoneme_accuracy.push_back(
        counted > 0 ? static_cast<double>(correct) / counted : 0.0);
    report.majority_accuracy.push_back(majority_baseline(set, type).accuracy);
  }
  return report;
}

ProbeResult linear_probe(const ModelParameters& frozen, const SampleSet& set,
                         const FeatureSet& features, int phoneme_type,
                         std::uint64_t seed) {
  if (phoneme_type < 0 || phoneme_type >= set.inventory().type_count())
    throw DataError("phoneme type id out of range");
  const int classes = set.inventory().type(phoneme_type).cardinality();
  const int embed = frozen.embed_dim();

  std::vector<Eigen::VectorXf> train_z, test_z;
  std::vector<int> train_y, test_y;
  for (std::size_t i = 0; i < set.samples().size(); ++i) {
    const VideoSample& s = set.samples()[i];
    const int label = s.phoneme_labels[phoneme_type];
    if (label == kMissing) continue;
    if (s.split == Split::Val) continue;
    const auto fwd = forward_sample(frozen, features.features[i]);
    if (s.split == Split::Train) {
      train_z.push_back(fwd.z2);
      train_y.push_back(label);
    } else {
      test_z.push_back(fwd.z2);
      test_y.push_back(label);
    }
  }
  if (train_y.empty())
    throw DataError("no labeled training samples for phoneme type " +
                    std::to_string(phoneme_type));

  // full-batch softmax regression with the adaptive-moment update
  Eigen::MatrixXf w = Eigen::MatrixXf::Zero(embed, classes);
  Eigen::VectorXf b = Eigen::VectorXf::Zero(classes);
  Eigen::MatrixXf mw = w, vw = w;
  Eigen::VectorXf mb = b, vb = b;
  const float lr = 0.05f, b1 = 0.9f, b2 = 0.999f, eps = 1e-8f;
  const int iterations = 300;
  (void)seed;

  for (int it = 1; it <= iterations; ++it) {
    Eigen::MatrixXf gw = Eigen::MatrixXf::Zero(embed, classes);
    Eigen::VectorXf gb = Eigen::VectorXf::Zero(classes);
    const float scale = 1.0f / static_cast<float>(train_y.size());
    for (std::size_t s = 0; s < train_y.size(); ++s) {
      Eigen::VectorXf logits = w.transpose() * train_z[s] + b;
      Eigen::VectorXf delta = softmax<float>(logits);
      delta[train_y[s]] -= 1.0f;
      delta *= scale;
      gw += train_z[s] * delta.transpose();
      gb += delta;
    }
    const float c1 = 1.0f - std::pow(b1, static_cast<float>(it));
    const float c2 = 1.0f - std::pow(b2, static_cast<float>(it));
    mw = b1 * mw + (1 - b1) * gw;
    vw = (b2 * vw.array() + (1 - b2) * gw.array().square()).matrix();
    w.array() -= lr * (mw.array() / c1) / ((vw.array() / c2).sqrt() + eps);
    mb = b1 * mb + (1 - b1) * gb;
    vb = (b2 * vb.array() + (1 - b2) * gb.array().square()).matrix();
    b.array() -= lr * (mb.array() / c1) / ((vb.array() / c2).sqrt() + eps);
  }

  ProbeResult result;
  result.head_w = w;
  result.head_b = b;
  result.train_count = static_cast<int>(train_y.size());
  result.test_count = static_cast<int>(test_y.size());
  int correct = 0;
  for (std::size_t s = 0; s < test_y.size(); ++s) {
    Eigen::VectorXf logits = w.transpose() * test_z[s] + b;
    Eigen::Index argmax;
    logits.maxCoeff(&argmax);
    if (static_cast<int>(argmax) == test_y[s]) ++correct;
  }
  result.test_accuracy =
      test_y.empty() ? 0.0 : static_cast<double>(correct) / test_y.size();
  return result;
}

}  // namespace signrec
