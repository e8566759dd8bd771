#include "signrec/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "signrec/errors.hpp"

namespace signrec {

namespace fs = std::filesystem;

LoadedData load_data_dir(const std::string& dir, bool with_poses) {
  LoadedData data;
  data.lexicon = load_lexicon(dir + "/lexicon.csv");
  const auto metadata = load_metadata(dir + "/metadata.json");
  data.samples = sampleset_from_metadata(metadata, data.lexicon.inventory());
  if (with_poses) load_poses(data.samples, dir + "/poses");
  return data;
}

void write_dataset(const SynthResult& synth, const std::string& dir) {
  fs::create_directories(dir);
  fs::create_directories(dir + "/poses");
  save_lexicon(synth.lexicon, dir + "/lexicon.csv");
  save_metadata(metadata_from_sampleset(synth.samples), dir + "/metadata.json");
  for (std::size_t i = 0; i < synth.samples.samples().size(); ++i)
    save_pose(synth.raw_poses[i],
              dir + "/poses/" + synth.samples.samples()[i].video_id + ".pose");
  save_manifest(synth.manifest, dir + "/manifest.json");
}

PhonemeSubset resolve_subset(const std::string& spec, const Lexicon& lexicon,
                             std::string* note) {
  const std::string s = spec.empty() ? "none" : spec;
  if (s == "none") {
    if (note) *note = "no auxiliary phoneme heads";
    return PhonemeSubset();
  }
  if (s == "all") {
    if (note) *note = "all " + std::to_string(lexicon.inventory().type_count()) +
                      " phoneme types";
    return lexicon.inventory().all_types();
  }
  if (s.rfind("optimal:", 0) == 0) {
    const int n = std::stoi(s.substr(8));
    UtilityResult r = select_optimal_subset(lexicon, n, SelectMethod::Exact);
    if (note) {
      std::ostringstream ss;
      ss << "optimal:" << n << " resolved by exact search to {";
      const auto names = r.type_names(lexicon.inventory());
      for (std::size_t i = 0; i < names.size(); ++i)
        ss << (i ? ", " : "") << names[i];
      ss << "} with utility " << r.utility;
      *note = ss.str();
    }
    return r.subset;
  }
  std::vector<std::string> names;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) names.push_back(item);
  if (note) *note = "explicit subset: " + s;
  return lexicon.inventory().subset_from_names(names);
}

namespace {

std::vector<double> per_seed_a1_all(const AggregateReport& agg) {
  return agg.a1[0].per_seed;
}

nlohmann::json cell_json(const AggregateCell& cell) {
  return {{"mean", cell.value.mean},
          {"sd", cell.value.sd},
          {"per_seed", cell.per_seed}};
}

nlohmann::json aggregate_json(const AggregateReport& agg) {
  const char* pops[3] = {"all", "with_labels", "without_labels"};
  nlohmann::json j;
  for (int pop = 0; pop < 3; ++pop) {
    j[pops[pop]] = {{"a1", cell_json(agg.a1[pop])},
                    {"a3", cell_json(agg.a3[pop])},
                    {"mrr", cell_json(agg.mrr[pop])}};
  }
  nlohmann::json heads = nlohmann::json::object();
  for (std::size_t h = 0; h < agg.head_names.size(); ++h)
    heads[agg.head_names[h]] = {
        {"accuracy", cell_json(agg.phoneme_accuracy[h])},
        {"majority_baseline", agg.majority_accuracy[h]}};
  j["phoneme_heads"] = std::move(heads);
  return j;
}

nlohmann::json welch_json(const WelchResult& r) {
  nlohmann::json j;
  j["t"] = std::isfinite(r.t) ? nlohmann::json(r.t)
                              : nlohmann::json(r.t > 0 ? "inf" : "-inf");
  j["df"] = r.df;
  j["p"] = r.p;
  j["corrected_alpha"] = r.corrected_alpha;
  j["significant"] = r.significant;
  j["degenerate"] = r.degenerate;
  return j;
}

nlohmann::json model_config_json(const ModelConfig& c) {
  return {{"t_model", c.t_model},
          {"embed_dim", c.embed_dim},
          {"pooling", pooling_name(c.pooling)},
          {"learning_rate", c.learning_rate},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"loss_weights", c.loss_weights}};
}

SampleSet labeled_only(const SampleSet& set) {
  std::vector<VideoSample> samples;
  for (const VideoSample& s : set.samples())
    if (s.labeled()) samples.push_back(s);
  return SampleSet(set.vocabulary(), set.inventory(), std::move(samples));
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const LoadedData& data, std::ostream* progress) {
  ExperimentOutcome outcome;
  std::string note;
  outcome.subset = resolve_subset(config.subset_spec, data.lexicon, &note);
  for (int t : outcome.subset)
    outcome.subset_names.push_back(data.lexicon.inventory().type(t).name);
  if (progress) *progress << "subset: " << note << "\n";

  const FeatureSet features = build_features(data.samples, config.model.t_model);

  std::vector<EvalReport> baseline_reports, auxiliary_reports;
  for (std::uint64_t seed : config.seeds) {
    ModelConfig mc = config.model;
    mc.seed = seed;

    TrainResult baseline = train(mc, data.samples, PhonemeSubset(), &features);
    if (progress)
      *progress << "seed " << seed << ": baseline best val A@1 "
                << baseline.best_val_accuracy << " at epoch "
                << baseline.best_epoch << " (" << baseline.epochs_run
                << " epochs)\n";
    baseline_reports.push_back(evaluate(baseline.params, data.samples, features,
                                        PhonemeSubset(), Split::Test));

    TrainResult auxiliary = train(mc, data.samples, outcome.subset, &features);
    if (progress)
      *progress << "seed " << seed << ": auxiliary best val A@1 "
                << auxiliary.best_val_accuracy << " at epoch "
                << auxiliary.best_epoch << " (" << auxiliary.epochs_run
                << " epochs)\n";
    auxiliary_reports.push_back(evaluate(auxiliary.params, data.samples, features,
                                         outcome.subset, Split::Test));
  }

  outcome.baseline = aggregate_seeds(baseline_reports);
  outcome.auxiliary = aggregate_seeds(auxiliary_reports);

  outcome.significance[0] =
      welch_test(outcome.auxiliary.a1[0].per_seed,
                 outcome.baseline.a1[0].per_seed, config.bonferroni_m);
  outcome.significance[1] =
      welch_test(outcome.auxiliary.a3[0].per_seed,
                 outcome.baseline.a3[0].per_seed, config.bonferroni_m);
  outcome.significance[2] =
      welch_test(outcome.auxiliary.mrr[0].per_seed,
                 outcome.baseline.mrr[0].per_seed, config.bonferroni_m);
  return outcome;
}

std::string experiment_report_json(const ExperimentOutcome& outcome,
                                   const ExperimentConfig& config) {
  nlohmann::json j;
  j["subset"] = {{"ids", outcome.subset.ids()}, {"names", outcome.subset_names}};
  j["seeds"] = config.seeds;
  j["model"] = model_config_json(config.model);
  j["baseline"] = aggregate_json(outcome.baseline);
  j["auxiliary"] = aggregate_json(outcome.auxiliary);

  const char* pops[3] = {"all", "with_labels", "without_labels"};
  nlohmann::json delta;
  for (int pop = 0; pop < 3; ++pop) {
    delta[pops[pop]] = {
        {"a1", outcome.auxiliary.a1[pop].value.mean -
                   outcome.baseline.a1[pop].value.mean},
        {"a3", outcome.auxiliary.a3[pop].value.mean -
                   outcome.baseline.a3[pop].value.mean},
        {"mrr", outcome.auxiliary.mrr[pop].value.mean -
                    outcome.baseline.mrr[pop].value.mean}};
  }
  j["delta"] = std::move(delta);
  j["significance"] = {{"a1", welch_json(outcome.significance[0])},
                       {"a3", welch_json(outcome.significance[1])},
                       {"mrr", welch_json(outcome.significance[2])}};
  return j.dump(1);
}

std::string experiment_report_text(const ExperimentOutcome& outcome) {
  std::ostringstream out;
  auto pct = [](const AggregateCell& c) { return format_mean_sd(c.value, 1, 100.0); };
  auto mrr = [](const AggregateCell& c) { return format_mean_sd(c.value, 2, 1.0); };

  out << "population          ";
  for (const char* pop : {"all", "with-P", "without-P"})
    out << "| " << pop << " %A@1 / %A@3 / MRR ";
  out << "\n";
  auto row = [&](const char* name, const AggregateReport& agg) {
    out << name;
    for (int pop = 0; pop < 3; ++pop)
      out << "| " << pct(agg.a1[pop]) << "  " << pct(agg.a3[pop]) << "  "
          << mrr(agg.mrr[pop]) << " ";
    out << "\n";
  };
  row("baseline (no P)     ", outcome.baseline);
  row("auxiliary (with P)  ", outcome.auxiliary);

  out << "delta improvement   ";
  char buf[64];
  for (int pop = 0; pop < 3; ++pop) {
    const double da1 = (outcome.auxiliary.a1[pop].value.mean -
                        outcome.baseline.a1[pop].value.mean) * 100.0;
    const double da3 = (outcome.auxiliary.a3[pop].value.mean -
                        outcome.baseline.a3[pop].value.mean) * 100.0;
    const double dmrr = outcome.auxiliary.mrr[pop].value.mean -
                        outcome.baseline.mrr[pop].value.mean;
    const char* s1 = pop == 0 && outcome.significance[0].significant ? "*" : "";
    const char* s3 = pop == 0 && outcome.significance[1].significant ? "*" : "";
    const char* sm = pop == 0 && outcome.significance[2].significant ? "*" : "";
    std::snprintf(buf, sizeof(buf), "| %s%+.1f  %s%+.1f  %s%+.2f ", s1, da1, s3,
                  da3, sm, dmrr);
    out << buf;
  }
  out << "\n";

  if (!outcome.auxiliary.head_names.empty()) {
    out << "\nphoneme head test accuracy (auxiliary model, labeled samples):\n";
    for (std::size_t h = 0; h < outcome.auxiliary.head_names.size(); ++h) {
      std::snprintf(buf, sizeof(buf), "  %-24s %s   majority %.1f\n",
                    outcome.auxiliary.head_names[h].c_str(),
                    format_mean_sd(outcome.auxiliary.phoneme_accuracy[h].value, 1,
                                   100.0)
                        .c_str(),
                    outcome.auxiliary.majority_accuracy[h] * 100.0);
      out << buf;
    }
  }
  out << "\n* significant under Welch's two-sided t-test with Bonferroni "
         "correction\n";
  return out.str();
}

void write_experiment_outputs(const ExperimentOutcome& outcome,
                              const ExperimentConfig& config,
                              const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream(out_dir + "/report.json") << experiment_report_json(outcome, config);
  std::ofstream(out_dir + "/report.txt") << experiment_report_text(outcome);
  std::ofstream(out_dir + "/resolved_config.json")
      << experiment_config_to_json(config);
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config,
                                const LoadedData& data, std::ostream* progress) {
  const SampleSet filtered = labeled_only(data.samples);
  if (filtered.samples().empty())
    throw DataError("sweep needs labeled samples");
  const FeatureSet features = build_features(filtered, config.model.t_model);

  std::vector<SweepRow> rows;
  for (int n : config.sweep_sizes) {
    if (n > data.lexicon.inventory().type_count()) {
      if (progress)
        *progress << "skipping n=" << n << ": only "
                  << data.lexicon.inventory().type_count() << " types\n";
      continue;
    }
    SweepRow row;
    row.n = n;
    UtilityResult selected = select_optimal_subset(data.lexicon, n, SelectMethod::Exact);
    row.subset = selected.subset;
    row.utility = selected.utility;
    for (int t : row.subset)
      row.subset_names.push_back(data.lexicon.inventory().type(t).name);

    std::vector<double> a1s, a3s, mrrs;
    for (std::uint64_t seed : config.seeds) {
      ModelConfig mc = config.model;
      mc.seed = seed;
      TrainResult r = train(mc, filtered, row.subset, &features);
      EvalReport e = evaluate(r.params, filtered, features, row.subset, Split::Val);
      a1s.push_back(e.all.a1);
      a3s.push_back(e.all.a3);
      mrrs.push_back(e.all.mrr);
    }
    row.a1 = mean_sd(a1s);
    row.a3 = mean_sd(a3s);
    row.mrr = mean_sd(mrrs);
    if (progress)
      *progress << "n=" << n << ": val A@1 " << row.a1.mean << "\n";
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_report_json(const std::vector<SweepRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const SweepRow& r : rows) {
    j.push_back({{"n", r.n},
                 {"subset_ids", r.subset.ids()},
                 {"subset_names", r.subset_names},
                 {"utility", r.utility},
                 {"a1", {{"mean", r.a1.mean}, {"sd", r.a1.sd}}},
                 {"a3", {{"mean", r.a3.mean}, {"sd", r.a3.sd}}},
                 {"mrr", {{"mean", r.mrr.mean}, {"sd", r.mrr.sd}}}});
  }
  return j.dump(1);
}

std::string sweep_report_text(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "  n  utility  %A@1       %A@3       MRR        subset\n";
  char buf[128];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%3d  %.4f  %-9s  %-9s  %-9s  ", r.n,
                  r.utility, format_mean_sd(r.a1, 1, 100.0).c_str(),
                  format_mean_sd(r.a3, 1, 100.0).c_str(),
                  format_mean_sd(r.mrr, 2, 1.0).c_str());
    out << buf;
    for (std::size_t i = 0; i < r.subset_names.size(); ++i)
      out << (i ? ", " : "") << r.subset_names[i];
    if (r.subset_names.empty()) out << "(empty)";
    out << "\n";
  }
  return out.str();
}

std::vector<ProbeRow> run_probe(const ExperimentConfig& config,
                                const LoadedData& data,
                                const TrainResult& baseline,
                                const TrainResult& full, std::ostream* progress) {
  if (!baseline.subset.empty())
    throw DataError("probe needs a baseline checkpoint trained without phoneme heads");
  if (full.subset.size() != data.lexicon.inventory().type_count())
    throw DataError("probe needs a checkpoint trained on all phoneme types");

  const FeatureSet features = build_features(data.samples, config.model.t_model);
  const EvalReport full_eval = evaluate(full.params, data.samples, features,
                                        full.subset, Split::Test);

  std::vector<ProbeRow> rows;
  for (int t = 0; t < data.lexicon.inventory().type_count(); ++t) {
    ProbeRow row;
    row.type_name = data.lexicon.inventory().type(t).name;
    row.full_model = full_eval.phoneme_accuracy[t];
    row.probe = linear_probe(baseline.params, data.samples, features, t).test_accuracy;
    row.majority = majority_baseline(data.samples, t).accuracy;
    if (progress)
      *progress << row.type_name << ": full " << row.full_model << ", probe "
                << row.probe << ", majority " << row.majority << "\n";
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string probe_report_json(const std::vector<ProbeRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const ProbeRow& r : rows)
    j.push_back({{"type", r.type_name},
                 {"full_model", r.full_model},
                 {"probe", r.probe},
                 {"majority", r.majority}});
  return j.dump(1);
}

std::string probe_report_text(const std::vector<ProbeRow>& rows) {
  std::ostringstream out;
  out << "phoneme type              full    probe   majority\n";
  char buf[96];
  for (const ProbeRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-24s  %5.1f   %5.1f   %5.1f\n",
                  r.type_name.c_str(), r.full_model * 100.0, r.probe * 100.0,
                  r.majority * 100.0);
    out << buf;
  }
  return out.str();
}

std::string probe_report_csv(const std::vector<ProbeRow>& rows) {
  std::ostringstream out;
  out << "type,full_model,probe,majority\n";
  for (const ProbeRow& r : rows)
    out << r.type_name << "," << r.full_model << "," << r.probe << ","
        << r.majority << "\n";
  return out.str();
}

namespace {

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig c;
  c.glosses = j.value("glosses", c.glosses);
  c.cardinalities = j.value("cardinalities", c.cardinalities);
  c.videos_per_gloss = j.value("videos_per_gloss", c.videos_per_gloss);
  c.frames = j.value("frames", c.frames);
  c.keypoints = j.value("keypoints", c.keypoints);
  c.coords = j.value("coords", c.coords);
  c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
  c.coverage = j.value("coverage", c.coverage);
  c.collision_rate = j.value("collision_rate", c.collision_rate);
  c.fps = j.value("fps", c.fps);
  c.seed = j.value("seed", c.seed);
  return c;
}

nlohmann::json synth_config_json(const SynthConfig& c) {
  return {{"glosses", c.glosses},
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
}

}  // namespace

ExperimentConfig experiment_config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed config JSON " + path + ": " + e.what());
  }
  ExperimentConfig c;
  c.data_dir = j.value("data_dir", c.data_dir);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.subset_spec = j.value("subset", c.subset_spec);
  c.seeds = j.value("seeds", c.seeds);
  c.bonferroni_m = j.value("bonferroni_m", c.bonferroni_m);
  c.sweep_sizes = j.value("sweep_sizes", c.sweep_sizes);
  if (j.contains("model")) {
    const auto& jm = j.at("model");
    c.model.t_model = jm.value("t_model", c.model.t_model);
    c.model.embed_dim = jm.value("embed_dim", c.model.embed_dim);
    if (jm.contains("pooling"))
      c.model.pooling = parse_pooling(jm.at("pooling").get<std::string>());
    c.model.learning_rate = jm.value("learning_rate", c.model.learning_rate);
    c.model.beta1 = jm.value("beta1", c.model.beta1);
    c.model.beta2 = jm.value("beta2", c.model.beta2);
    c.model.epsilon = jm.value("epsilon", c.model.epsilon);
    c.model.batch_size = jm.value("batch_size", c.model.batch_size);
    c.model.max_epochs = jm.value("max_epochs", c.model.max_epochs);
    c.model.patience = jm.value("patience", c.model.patience);
    c.model.loss_weights = jm.value("loss_weights", c.model.loss_weights);
  }
  if (j.contains("synth")) c.synth = synth_config_from_json(j.at("synth"));
  return c;
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["data_dir"] = config.data_dir;
  j["output_dir"] = config.output_dir;
  j["subset"] = config.subset_spec;
  j["seeds"] = config.seeds;
  j["bonferroni_m"] = config.bonferroni_m;
  j["sweep_sizes"] = config.sweep_sizes;
  j["model"] = model_config_json(config.model);
  j["synth"] = synth_config_json(config.synth);
  return j.dump(1);
}

}  // namespace signrec
