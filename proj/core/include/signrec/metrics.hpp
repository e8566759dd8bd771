#pragma once

#include <string>
#include <vector>

#include "signrec/dataset.hpp"

namespace signrec {

struct RankedPrediction {
  std::vector<double> scores;  // one per vocabulary entry
  int true_gloss = 0;
};

// Optimistic rank: 1 + the number of strictly greater scores.
int rank_of_true(const RankedPrediction& prediction);
// Number of other entries tied with the true gloss's score.
int tie_count(const RankedPrediction& prediction);

double topk_accuracy(const std::vector<RankedPrediction>& predictions, int k);
double mean_reciprocal_rank(const std::vector<RankedPrediction>& predictions);

struct MajorityBaseline {
  int majority_value = 0;  // most frequent training value, smallest id on ties
  double accuracy = 0.0;   // of always predicting it on the test split
  int train_count = 0;
  int test_count = 0;
};

// head_type < 0 evaluates the gloss head; otherwise the phoneme type, over
// the samples that carry a label for it. Throws DataError when the training
// split has no labeled sample for the head.
MajorityBaseline majority_baseline(const SampleSet& set, int head_type);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  double corrected_alpha = 0.05;
  bool significant = false;
  bool degenerate = false;  // a group had < 2 values or zero variance
};

// Welch's two-sided t-test with a Bonferroni correction over m comparisons.
WelchResult welch_test(const std::vector<double>& group_a,
                       const std::vector<double>& group_b,
                       int num_comparisons = 3, double alpha = 0.05);

// Regularized incomplete beta function I_x(a, b), used for the t CDF.
double incomplete_beta(double a, double b, double x);
// Two-sided p-value for a t statistic with the given degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
  int n = 0;
};

MeanSd mean_sd(const std::vector<double>& values);

// Recognition metrics for one population of samples.
struct MetricTriple {
  double a1 = 0.0;
  double a3 = 0.0;
  double mrr = 0.0;
  int count = 0;
};

MetricTriple metric_triple(const std::vector<RankedPrediction>& predictions);

// One evaluation of one model on one split: the three populations plus the
// per-phoneme-head accuracies (over labeled samples).
struct EvalReport {
  MetricTriple all, with_labels, without_labels;
  std::vector<std::string> head_names;       // active phoneme heads
  std::vector<double> phoneme_accuracy;      // per head
  std::vector<double> majority_accuracy;     // per head
};

// Per-cell mean and sample sd across seeds.
struct AggregateCell {
  MeanSd value;
  std::vector<double> per_seed;
};

struct AggregateReport {
  AggregateCell a1[3], a3[3], mrr[3];  // indexed all/with/without
  std::vector<std::string> head_names;
  std::vector<AggregateCell> phoneme_accuracy;
  std::vector<double> majority_accuracy;
};

AggregateReport aggregate_seeds(const std::vector<EvalReport>& reports);

// "29.4±1.0" style cell used in text tables.
std::string format_mean_sd(const MeanSd& value, int decimals, double scale = 1.0);

}  // namespace signrec
