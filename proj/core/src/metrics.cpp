#include "signrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "signrec/errors.hpp"

namespace signrec {

int rank_of_true(const RankedPrediction& prediction) {
  if (prediction.scores.empty()) throw DataError("empty score vector");
  if (prediction.true_gloss < 0 ||
      prediction.true_gloss >= static_cast<int>(prediction.scores.size()))
    throw DataError("true gloss id out of range");
  const double true_score = prediction.scores[prediction.true_gloss];
  if (!std::isfinite(true_score)) throw DataError("non-finite score");
  int greater = 0;
  for (double s : prediction.scores) {
    if (!std::isfinite(s)) throw DataError("non-finite score");
    if (s > true_score) ++greater;
  }
  return 1 + greater;
}

int tie_count(const RankedPrediction& prediction) {
  const double true_score = prediction.scores[prediction.true_gloss];
  int ties = -1;  // the true entry itself matches
  for (double s : prediction.scores)
    if (s == true_score) ++ties;
  return ties;
}

double topk_accuracy(const std::vector<RankedPrediction>& predictions, int k) {
  if (k < 1) throw DataError("k must be >= 1");
  if (predictions.empty()) return 0.0;
  int hits = 0;
  for (const RankedPrediction& p : predictions)
    if (rank_of_true(p) <= k) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double mean_reciprocal_rank(const std::vector<RankedPrediction>& predictions) {
  if (predictions.empty()) return 0.0;
  double sum = 0.0;
  for (const RankedPrediction& p : predictions)
    sum += 1.0 / static_cast<double>(rank_of_true(p));
  return sum / static_cast<double>(predictions.size());
}

MetricTriple metric_triple(const std::vector<RankedPrediction>& predictions) {
  MetricTriple m;
  m.count = static_cast<int>(predictions.size());
  if (predictions.empty()) return m;
  m.a1 = topk_accuracy(predictions, 1);
  m.a3 = topk_accuracy(predictions, 3);
  m.mrr = mean_reciprocal_rank(predictions);
  return m;
}

MajorityBaseline majority_baseline(const SampleSet& set, int head_type) {
  if (head_type >= set.inventory().type_count())
    throw DataError("phoneme type id out of range");

  auto label_of = [&](const VideoSample& s) {
    return head_type < 0 ? s.gloss_id : s.phoneme_labels[head_type];
  };

  std::map<int, int> counts;
  int train_count = 0;
  for (const VideoSample& s : set.samples()) {
    if (s.split != Split::Train) continue;
    const int label = label_of(s);
    if (label == kMissing) continue;
    ++counts[label];
    ++train_count;
  }
  if (train_count == 0)
    throw DataError("no labeled training samples for head " +
                    std::to_string(head_type));

  // std::map iterates ascending, so the smallest value wins frequency ties
  int majority = -1, best = 0;
  for (const auto& [value, count] : counts) {
    if (count > best) {
      best = count;
      majority = value;
    }
  }

  int test_count = 0, correct = 0;
  for (const VideoSample& s : set.samples()) {
    if (s.split != Split::Test) continue;
    const int label = label_of(s);
    if (label == kMissing) continue;
    ++test_count;
    if (label == majority) ++correct;
  }

  MajorityBaseline result;
  result.majority_value = majority;
  result.train_count = train_count;
  result.test_count = test_count;
  result.accuracy = test_count > 0
                        ? static_cast<double>(correct) / static_cast<double>(test_count)
                        : 0.0;
  return result;
}

namespace {

// continued fraction for the incomplete beta (Lentz's algorithm)
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  if (t == 0.0) return 1.0;
  return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

WelchResult welch_test(const std::vector<double>& group_a,
                       const std::vector<double>& group_b, int num_comparisons,
                       double alpha) {
  if (num_comparisons < 1) throw DataError("comparison count must be >= 1");
  WelchResult r;
  r.corrected_alpha = alpha / num_comparisons;

  const auto a = mean_sd(group_a);
  const auto b = mean_sd(group_b);
  const double va = a.sd * a.sd, vb = b.sd * b.sd;
  r.degenerate = a.n < 2 || b.n < 2 || va <= 0.0 || vb <= 0.0;
  if (a.n < 2 || b.n < 2) return r;

  const double sa = va / a.n, sb = vb / b.n;
  const double se2 = sa + sb;
  if (se2 == 0.0) {
    r.t = 0.0;
    r.df = static_cast<double>(a.n + b.n - 2);
    r.p = a.mean == b.mean ? 1.0 : 0.0;
    if (a.mean != b.mean)
      r.t = std::numeric_limits<double>::infinity() * (a.mean > b.mean ? 1 : -1);
    return r;
  }
  r.t = (a.mean - b.mean) / std::sqrt(se2);
  r.df = se2 * se2 / (sa * sa / (a.n - 1) + sb * sb / (b.n - 1));
  r.p = student_t_two_sided_p(r.t, r.df);
  r.significant = !r.degenerate && r.p < r.corrected_alpha;
  return r;
}

MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd out;
  out.n = static_cast<int>(values.size());
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / out.n;
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(ss / (out.n - 1));
  return out;
}

namespace {

AggregateCell aggregate_cell(const std::vector<EvalReport>& reports,
                             double (*get)(const EvalReport&)) {
  AggregateCell cell;
  for (const EvalReport& r : reports) cell.per_seed.push_back(get(r));
  cell.value = mean_sd(cell.per_seed);
  return cell;
}

}  // namespace

AggregateReport aggregate_seeds(const std::vector<EvalReport>& reports) {
  if (reports.size() < 2) throw DataError("seed aggregation needs >= 2 reports");
  for (const EvalReport& r : reports)
    if (r.head_names != reports.front().head_names)
      throw DataError("mismatched report shapes across seeds");

  AggregateReport agg;
  agg.head_names = reports.front().head_names;

  using Getter = double (*)(const EvalReport&);
  const Getter a1[3] = {[](const EvalReport& r) { return r.all.a1; },
                        [](const EvalReport& r) { return r.with_labels.a1; },
                        [](const EvalReport& r) { return r.without_labels.a1; }};
  const Getter a3[3] = {[](const EvalReport& r) { return r.all.a3; },
                        [](const EvalReport& r) { return r.with_labels.a3; },
                        [](const EvalReport& r) { return r.without_labels.a3; }};
  const Getter mrr[3] = {[](const EvalReport& r) { return r.all.mrr; },
                         [](const EvalReport& r) { return r.with_labels.mrr; },
                         [](const EvalReport& r) { return r.without_labels.mrr; }};
  for (int pop = 0; pop < 3; ++pop) {
    agg.a1[pop] = aggregate_cell(reports, a1[pop]);
    agg.a3[pop] = aggregate_cell(reports, a3[pop]);
    agg.mrr[pop] = aggregate_cell(reports, mrr[pop]);
  }

  for (std::size_t h = 0; h < agg.head_names.size(); ++h) {
    AggregateCell cell;
    double majority = 0.0;
    for (const EvalReport& r : reports) {
      cell.per_seed.push_back(r.phoneme_accuracy[h]);
      majority += r.majority_accuracy[h] / reports.size();
    }
    cell.value = mean_sd(cell.per_seed);
    agg.phoneme_accuracy.push_back(std::move(cell));
    agg.majority_accuracy.push_back(majority);
  }
  return agg;
}

std::string format_mean_sd(const MeanSd& value, int decimals, double scale) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f±%.*f", decimals, value.mean * scale,
                decimals, value.sd * scale);
  return buf;
}

}  // namespace signrec
