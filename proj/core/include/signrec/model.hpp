#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "signrec/errors.hpp"
#include "signrec/inventory.hpp"
#include "signrec/rng.hpp"

namespace signrec {

enum class Pooling { Mean, TemporalAttention };

Pooling parse_pooling(const std::string& name);
std::string pooling_name(Pooling pooling);

struct ModelConfig {
  int t_model = 32;     // frames after resampling
  int embed_dim = 64;
  Pooling pooling = Pooling::TemporalAttention;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 32;
  int max_epochs = 300;
  int patience = 30;
  std::vector<double> loss_weights;  // per phoneme head; empty = all 1.0
  std::uint64_t seed = 0;
};

struct HeadSpec {
  std::string name;
  int size = 0;
};

// All weights of the shared encoder plus one linear head per output. The
// same structure doubles as the gradient and optimizer-moment holder.
template <class Scalar>
struct ModelParametersT {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Pooling pooling = Pooling::TemporalAttention;
  Mat proj_w;  // D x E per-frame projection
  Mat proj_b;  // E x 1
  Mat attn;    // E x 1 attention scoring vector (0 x 1 for mean pooling)
  Mat h1_w;    // E x E
  Mat h1_b;    // E x 1
  Mat h2_w;    // E x E
  Mat h2_b;    // E x 1
  std::vector<Mat> head_w;  // E x H_h, head 0 is the gloss head
  std::vector<Mat> head_b;  // H_h x 1

  int input_dim() const { return static_cast<int>(proj_w.rows()); }
  int embed_dim() const { return static_cast<int>(proj_w.cols()); }
  int head_count() const { return static_cast<int>(head_w.size()); }
  int head_size(int h) const { return static_cast<int>(head_w[h].cols()); }

  template <class Fn>
  void visit(Fn&& fn) {
    fn("proj_w", proj_w);
    fn("proj_b", proj_b);
    if (pooling == Pooling::TemporalAttention) fn("attn", attn);
    fn("h1_w", h1_w);
    fn("h1_b", h1_b);
    fn("h2_w", h2_w);
    fn("h2_b", h2_b);
    for (std::size_t h = 0; h < head_w.size(); ++h) {
      fn(("head" + std::to_string(h) + "_w").c_str(), head_w[h]);
      fn(("head" + std::to_string(h) + "_b").c_str(), head_b[h]);
    }
  }

  std::vector<Mat*> tensors() {
    std::vector<Mat*> out;
    visit([&](const char*, Mat& m) { out.push_back(&m); });
    return out;
  }

  static ModelParametersT zeros(int input_dim, int embed_dim, Pooling pooling,
                                const std::vector<int>& head_sizes) {
    ModelParametersT p;
    p.pooling = pooling;
    p.proj_w = Mat::Zero(input_dim, embed_dim);
    p.proj_b = Mat::Zero(embed_dim, 1);
    p.attn = pooling == Pooling::TemporalAttention ? Mat::Zero(embed_dim, 1)
                                                   : Mat::Zero(0, 1);
    p.h1_w = Mat::Zero(embed_dim, embed_dim);
    p.h1_b = Mat::Zero(embed_dim, 1);
    p.h2_w = Mat::Zero(embed_dim, embed_dim);
    p.h2_b = Mat::Zero(embed_dim, 1);
    for (int size : head_sizes) {
      p.head_w.push_back(Mat::Zero(embed_dim, size));
      p.head_b.push_back(Mat::Zero(size, 1));
    }
    return p;
  }

  // Fan-in-scaled uniform init, seed-controlled.
  static ModelParametersT init(int input_dim, int embed_dim, Pooling pooling,
                               const std::vector<int>& head_sizes,
                               std::uint64_t seed) {
    ModelParametersT p = zeros(input_dim, embed_dim, pooling, head_sizes);
    Rng rng(mix_seed(seed, 0x9a7a));
    p.visit([&](const char* name, Mat& m) {
      const double fan_in =
          std::string(name) == "proj_w" ? input_dim : std::max(embed_dim, 1);
      const double bound = std::sqrt(1.0 / fan_in);
      for (Eigen::Index i = 0; i < m.size(); ++i)
        m.data()[i] = static_cast<Scalar>(bound * (2.0 * rng.uniform() - 1.0));
    });
    return p;
  }

  ModelParametersT zeros_like() const {
    std::vector<int> sizes;
    for (const Mat& w : head_w) sizes.push_back(static_cast<int>(w.cols()));
    return zeros(input_dim(), embed_dim(), pooling, sizes);
  }

  template <class S2>
  ModelParametersT<S2> cast() const {
    ModelParametersT<S2> out;
    out.pooling = pooling;
    out.proj_w = proj_w.template cast<S2>();
    out.proj_b = proj_b.template cast<S2>();
    out.attn = attn.template cast<S2>();
    out.h1_w = h1_w.template cast<S2>();
    out.h1_b = h1_b.template cast<S2>();
    out.h2_w = h2_w.template cast<S2>();
    out.h2_b = h2_b.template cast<S2>();
    for (const Mat& w : head_w) out.head_w.push_back(w.template cast<S2>());
    for (const Mat& b : head_b) out.head_b.push_back(b.template cast<S2>());
    return out;
  }

  bool all_finite() const {
    bool ok = true;
    const_cast<ModelParametersT*>(this)->visit(
        [&](const char*, Mat& m) { ok = ok && m.allFinite(); });
    return ok;
  }
};

using ModelParameters = ModelParametersT<float>;

// One training batch: fixed-length inputs plus labels. phoneme_labels has one
// entry per phoneme head (head order, not inventory order); kMissing masks.
template <class Scalar>
struct BatchT {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  std::vector<Mat> inputs;  // each t_model x input_dim
  std::vector<int> gloss_labels;
  std::vector<std::vector<int>> phoneme_labels;

  int size() const { return static_cast<int>(inputs.size()); }
};

using Batch = BatchT<float>;

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> softmax(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& logits) {
  const Scalar max = logits.maxCoeff();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> p = (logits.array() - max).exp();
  return p / p.sum();
}

// Per-sample activations cached for the backward pass.
template <class Scalar>
struct SampleForward {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Mat h_pre, h;  // T x E
  Vec alpha;     // T attention weights, empty for mean pooling
  Vec z0, z1_pre, z1, z2_pre, z2;
  std::vector<Vec> logits;  // per head
};

// Samples are processed independently (no batch-coupled ops), so per-sample
// results do not depend on what else is in the batch.
template <class Scalar>
SampleForward<Scalar> forward_sample(
    const ModelParametersT<Scalar>& p,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x) {
  if (!x.allFinite()) throw DataError("non-finite values in model input");
  SampleForward<Scalar> f;
  f.h_pre = x * p.proj_w;
  f.h_pre.rowwise() += p.proj_b.col(0).transpose();
  f.h = f.h_pre.cwiseMax(Scalar(0));

  if (p.pooling == Pooling::TemporalAttention) {
    typename SampleForward<Scalar>::Vec scores = f.h * p.attn.col(0);
    f.alpha = softmax<Scalar>(scores);
    f.z0 = f.h.transpose() * f.alpha;
  } else {
    f.z0 = f.h.colwise().mean().transpose();
  }

  f.z1_pre = p.h1_w.transpose() * f.z0 + p.h1_b.col(0);
  f.z1 = f.z1_pre.cwiseMax(Scalar(0));
  f.z2_pre = p.h2_w.transpose() * f.z1 + p.h2_b.col(0);
  f.z2 = f.z2_pre.cwiseMax(Scalar(0));

  f.logits.reserve(p.head_count());
  for (int h = 0; h < p.head_count(); ++h)
    f.logits.push_back(p.head_w[h].transpose() * f.z2 + p.head_b[h].col(0));
  return f;
}

template <class Scalar>
std::vector<SampleForward<Scalar>> forward(const ModelParametersT<Scalar>& p,
                                           const BatchT<Scalar>& batch) {
  std::vector<SampleForward<Scalar>> out;
  out.reserve(batch.inputs.size());
  for (const auto& x : batch.inputs) out.push_back(forward_sample(p, x));
  return out;
}

struct LossBreakdown {
  double gloss_loss = 0.0;
  std::vector<double> phoneme_losses;   // unweighted, per phoneme head
  std::vector<int> labeled_counts;      // per phoneme head
  int gloss_count = 0;
  double total = 0.0;  // gloss + sum of weighted phoneme losses
};

inline std::vector<double> resolve_weights(const std::vector<double>& weights,
                                           int phoneme_heads) {
  if (weights.empty()) return std::vector<double>(phoneme_heads, 1.0);
  if (static_cast<int>(weights.size()) != phoneme_heads)
    throw DataError("loss weight count does not match phoneme head count");
  return weights;
}

// Mean cross-entropy per head over the samples carrying a label for it.
// A head with no labeled samples contributes exactly 0.
template <class Scalar>
LossBreakdown compute_loss(const ModelParametersT<Scalar>& p,
                           const std::vector<SampleForward<Scalar>>& fwd,
                           const BatchT<Scalar>& batch,
                           const std::vector<double>& loss_weights = {}) {
  const int n = batch.size();
  const int phoneme_heads = p.head_count() - 1;
  const std::vector<double> weights = resolve_weights(loss_weights, phoneme_heads);

  auto cross_entropy = [](const typename SampleForward<Scalar>::Vec& logits,
                          int label) {
    const double max = static_cast<double>(logits.maxCoeff());
    double sum = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i)
      sum += std::exp(static_cast<double>(logits[i]) - max);
    return std::log(sum) + max - static_cast<double>(logits[label]);
  };

  LossBreakdown loss;
  loss.phoneme_losses.assign(phoneme_heads, 0.0);
  loss.labeled_counts.assign(phoneme_heads, 0);

  for (int s = 0; s < n; ++s) {
    const int y = batch.gloss_labels[s];
    if (y < 0 || y >= p.head_size(0))
      throw DataError("gloss label out of range");
    loss.gloss_loss += cross_entropy(fwd[s].logits[0], y);
    ++loss.gloss_count;
  }
  if (loss.gloss_count > 0) loss.gloss_loss /= loss.gloss_count;

  for (int h = 0; h < phoneme_heads; ++h) {
    double sum = 0.0;
    int count = 0;
    for (int s = 0; s < n; ++s) {
      const int y = batch.phoneme_labels[s][h];
      if (y == kMissing) continue;
      if (y < 0 || y >= p.head_size(h + 1))
        throw DataError("phoneme label out of range for head " + std::to_string(h));
      sum += cross_entropy(fwd[s].logits[h + 1], y);
      ++count;
    }
    loss.labeled_counts[h] = count;
    loss.phoneme_losses[h] = count > 0 ? sum / count : 0.0;
  }

  loss.total = loss.gloss_loss;
  for (int h = 0; h < phoneme_heads; ++h)
    loss.total += weights[h] * loss.phoneme_losses[h];
  return loss;
}

// Gradients of the total loss w.r.t. every parameter. Phoneme-head terms
// flow into the shared encoder alongside the gloss term.
template <class Scalar>
ModelParametersT<Scalar> backward(const ModelParametersT<Scalar>& p,
                                  const BatchT<Scalar>& batch,
                                  const std::vector<SampleForward<Scalar>>& fwd,
                                  const std::vector<double>& loss_weights = {}) {
  using Mat = typename ModelParametersT<Scalar>::Mat;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const int n = batch.size();
  const int heads = p.head_count();
  const std::vector<double> weights = resolve_weights(loss_weights, heads - 1);

  // per-head labeled counts fix the mean-reduction scale
  std::vector<int> counts(heads, 0);
  counts[0] = n;
  for (int h = 1; h < heads; ++h)
    for (int s = 0; s < n; ++s)
      if (batch.phoneme_labels[s][h - 1] != kMissing) ++counts[h];

  ModelParametersT<Scalar> g = p.zeros_like();
  auto relu_mask = [](const auto& pre) {
    return (pre.array() > Scalar(0)).template cast<Scalar>().matrix();
  };

  for (int s = 0; s < n; ++s) {
    const SampleForward<Scalar>& f = fwd[s];
    Vec dz2 = Vec::Zero(p.embed_dim());

    for (int h = 0; h < heads; ++h) {
      const int label = h == 0 ? batch.gloss_labels[s] : batch.phoneme_labels[s][h - 1];
      if (label == kMissing) continue;
      const double w = h == 0 ? 1.0 : weights[h - 1];
      Vec dlogit = softmax<Scalar>(f.logits[h]);
      dlogit[label] -= Scalar(1);
      dlogit *= static_cast<Scalar>(w / counts[h]);
      g.head_w[h] += f.z2 * dlogit.transpose();
      g.head_b[h].col(0) += dlogit;
      dz2 += p.head_w[h] * dlogit;
    }

    const Vec dz2_pre = dz2.cwiseProduct(relu_mask(f.z2_pre));
    g.h2_w += f.z1 * dz2_pre.transpose();
    g.h2_b.col(0) += dz2_pre;
    const Vec dz1 = p.h2_w * dz2_pre;
    const Vec dz1_pre = dz1.cwiseProduct(relu_mask(f.z1_pre));
    g.h1_w += f.z0 * dz1_pre.transpose();
    g.h1_b.col(0) += dz1_pre;
    const Vec dz0 = p.h1_w * dz1_pre;

    const int t_frames = static_cast<int>(f.h.rows());
    Mat dh;
    if (p.pooling == Pooling::TemporalAttention) {
      const Vec dalpha = f.h * dz0;
      dh = f.alpha * dz0.transpose();
      const Scalar inner = f.alpha.dot(dalpha);
      const Vec dscores = f.alpha.cwiseProduct(
          (dalpha.array() - inner).matrix().eval());
      g.attn.col(0) += f.h.transpose() * dscores;
      dh += dscores * p.attn.col(0).transpose();
    } else {
      dh = Mat::Ones(t_frames, 1) * (dz0 / Scalar(t_frames)).transpose();
    }

    const Mat dh_pre = dh.cwiseProduct(relu_mask(f.h_pre));
    g.proj_w += batch.inputs[s].transpose() * dh_pre;
    g.proj_b.col(0) += dh_pre.colwise().sum().transpose();
  }
  return g;
}

struct GradcheckReport {
  struct TensorError {
    std::string name;
    double max_rel_err = 0.0;
  };
  std::vector<TensorError> tensors;
  double max_rel_err = 0.0;
  double tolerance = 1e-4;
  bool passed = false;
};

// Central finite differences of the total loss against the analytic backward
// pass, in double precision.
GradcheckReport gradcheck(const ModelParametersT<double>& params,
                          const BatchT<double>& batch,
                          const std::vector<double>& loss_weights = {},
                          double tolerance = 1e-4, double step = 1e-5);

// The standard verification grid: {mean, attention} pooling x {0, 2, 16}
// phoneme heads x {full, mixed-missing} labels, on tiny random batches.
struct GradcheckGridEntry {
  std::string name;
  GradcheckReport report;
};
std::vector<GradcheckGridEntry> run_gradcheck_grid(double tolerance = 1e-4,
                                                   double step = 1e-5);

// Adaptive-moment update (bias-corrected first/second moments).
template <class Scalar>
struct AdamState {
  ModelParametersT<Scalar> m, v;
  long step = 0;

  explicit AdamState(const ModelParametersT<Scalar>& params)
      : m(params.zeros_like()), v(params.zeros_like()) {}

  void update(ModelParametersT<Scalar>& params, ModelParametersT<Scalar>& grads,
              const ModelConfig& config) {
    ++step;
    const Scalar b1 = static_cast<Scalar>(config.beta1);
    const Scalar b2 = static_cast<Scalar>(config.beta2);
    const Scalar lr = static_cast<Scalar>(config.learning_rate);
    const Scalar eps = static_cast<Scalar>(config.epsilon);
    const Scalar c1 = static_cast<Scalar>(1.0 - std::pow(config.beta1, step));
    const Scalar c2 = static_cast<Scalar>(1.0 - std::pow(config.beta2, step));

    auto ps = params.tensors();
    auto gs = grads.tensors();
    auto ms = m.tensors();
    auto vs = v.tensors();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      auto& mp = *ms[i];
      auto& vp = *vs[i];
      const auto& gp = *gs[i];
      mp = b1 * mp + (Scalar(1) - b1) * gp;
      vp = (b2 * vp.array() + (Scalar(1) - b2) * gp.array().square()).matrix();
      ps[i]->array() -=
          lr * (mp.array() / c1) / ((vp.array() / c2).sqrt() + eps);
    }
  }
};

}  // namespace signrec
