#include "signrec/model.hpp"

namespace signrec {

Pooling parse_pooling(const std::string& name) {
  if (name == "mean") return Pooling::Mean;
  if (name == "temporal-attention" || name == "attention")
    return Pooling::TemporalAttention;
  throw DataError("unknown pooling: '" + name + "'");
}

std::string pooling_name(Pooling pooling) {
  return pooling == Pooling::Mean ? "mean" : "temporal-attention";
}

GradcheckReport gradcheck(const ModelParametersT<double>& params,
                          const BatchT<double>& batch,
                          const std::vector<double>& loss_weights,
                          double tolerance, double step) {
  GradcheckReport report;
  report.tolerance = tolerance;

  auto total_loss = [&](const ModelParametersT<double>& p) {
    auto fwd = forward(p, batch);
    return compute_loss(p, fwd, batch, loss_weights).total;
  };

  ModelParametersT<double> analytic =
      backward(params, batch, forward(params, batch), loss_weights);
  ModelParametersT<double> probe = params;  // mutated in place, then restored

  auto analytic_tensors = analytic.tensors();
  auto probe_tensors = probe.tensors();
  std::vector<std::string> names;
  probe.visit([&](const char* name, auto&) { names.emplace_back(name); });

  for (std::size_t t = 0; t < probe_tensors.size(); ++t) {
    auto& tensor = *probe_tensors[t];
    const auto& grad = *analytic_tensors[t];
    double max_rel = 0.0;
    for (Eigen::Index i = 0; i < tensor.size(); ++i) {
      const double original = tensor.data()[i];
      tensor.data()[i] = original + step;
      const double plus = total_loss(probe);
      tensor.data()[i] = original - step;
      const double minus = total_loss(probe);
      tensor.data()[i] = original;

      const double numeric = (plus - minus) / (2.0 * step);
      const double a = grad.data()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      max_rel = std::max(max_rel, std::abs(a - numeric) / denom);
    }
    report.tensors.push_back({names[t], max_rel});
    report.max_rel_err = std::max(report.max_rel_err, max_rel);
  }
  report.passed = report.max_rel_err < tolerance;
  return report;
}

std::vector<GradcheckGridEntry> run_gradcheck_grid(double tolerance, double step) {
  constexpr int kFrames = 5, kInputDim = 4, kEmbed = 6, kVocab = 5, kBatch = 3;

  auto make_batch = [&](const std::vector<int>& head_sizes, int masking,
                        Rng& rng) {
    BatchT<double> batch;
    for (int s = 0; s < kBatch; ++s) {
      Eigen::MatrixXd x(kFrames, kInputDim);
      for (Eigen::Index i = 0; i < x.size(); ++i)
        x.data()[i] = rng.gaussian();
      batch.inputs.push_back(std::move(x));
      batch.gloss_labels.push_back(static_cast<int>(rng.uniform_int(kVocab)));
      std::vector<int> labels;
      for (std::size_t h = 1; h < head_sizes.size(); ++h) {
        // masking 0: all labeled; 1: mixed; 2: all missing
        const bool missing =
            masking == 2 || (masking == 1 && (s + static_cast<int>(h)) % 2 == 0);
        labels.push_back(missing
                             ? kMissing
                             : static_cast<int>(rng.uniform_int(head_sizes[h])));
      }
      batch.phoneme_labels.push_back(std::move(labels));
    }
    return batch;
  };

  std::vector<GradcheckGridEntry> entries;
  const Pooling poolings[2] = {Pooling::Mean, Pooling::TemporalAttention};
  const int subset_sizes[3] = {0, 2, 16};
  const char* mask_names[2] = {"full", "mixed"};

  std::uint64_t seed = 0;
  for (Pooling pooling : poolings) {
    for (int subset : subset_sizes) {
      std::vector<int> head_sizes = {kVocab};
      for (int h = 0; h < subset; ++h) head_sizes.push_back(2 + h % 3);
      for (int masking = 0; masking < 2; ++masking) {
        Rng rng(mix_seed(0xc4ec, ++seed));
        auto params = ModelParametersT<double>::init(
            kInputDim, kEmbed, pooling, head_sizes, rng.next_u64());
        const auto batch = make_batch(head_sizes, subset == 0 ? 0 : masking, rng);

        GradcheckGridEntry entry;
        entry.name = pooling_name(pooling) + " | " + std::to_string(subset) +
                     " phoneme heads | " + mask_names[masking] + " labels";
        entry.report = gradcheck(params, batch, {}, tolerance, step);
        entries.push_back(std::move(entry));
      }
    }
  }
  return entries;
}

}  // namespace signrec
