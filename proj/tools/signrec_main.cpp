// signrec: phonology-aware isolated sign language recognition toolkit.
//
// Subcommands cover the full pipeline: synthetic data generation, joining a
// benchmark metadata file with a phonologically coded lexicon, phoneme-subset
// utility analysis, multi-head model training, evaluation, and the paired
// baseline-vs-auxiliary experiment with significance testing.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "signrec/checkpoint.hpp"
#include "signrec/errors.hpp"
#include "signrec/experiment.hpp"

namespace fs = std::filesystem;
using namespace signrec;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
  return out;
}

struct FormatOption {
  std::string format = "text";
  bool json() const { return format == "json"; }
};

void add_format_flag(CLI::App* cmd, FormatOption& fmt) {
  cmd->add_option("--format", fmt.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));
}

// Model flags shared by train/experiment/probe. Only flags the user actually
// passed override the config-file values.
struct ModelFlags {
  CLI::Option *t_model, *embed_dim, *pooling, *lr, *batch, *epochs, *patience,
      *weights;
  int t_model_v = 32, embed_dim_v = 64, batch_v = 32, epochs_v = 300,
      patience_v = 30;
  std::string pooling_v = "temporal-attention";
  double lr_v = 1e-3;
  std::string weights_v;

  void add(CLI::App* cmd) {
    t_model = cmd->add_option("--t-model", t_model_v, "Frames after resampling");
    embed_dim = cmd->add_option("--embed-dim", embed_dim_v, "Encoder width");
    pooling = cmd->add_option("--pooling", pooling_v, "mean | temporal-attention")
                  ->check(CLI::IsMember({"mean", "temporal-attention", "attention"}));
    lr = cmd->add_option("--lr", lr_v, "Learning rate");
    batch = cmd->add_option("--batch-size", batch_v, "Mini-batch size");
    epochs = cmd->add_option("--max-epochs", epochs_v, "Epoch cap");
    patience = cmd->add_option("--patience", patience_v,
                               "Early-stopping patience (epochs)");
    weights = cmd->add_option("--loss-weights", weights_v,
                              "Comma-separated per-phoneme-head loss weights");
  }

  void apply(ModelConfig& config) const {
    if (*t_model) config.t_model = t_model_v;
    if (*embed_dim) config.embed_dim = embed_dim_v;
    if (*pooling) config.pooling = parse_pooling(pooling_v);
    if (*lr) config.learning_rate = lr_v;
    if (*batch) config.batch_size = batch_v;
    if (*epochs) config.max_epochs = epochs_v;
    if (*patience) config.patience = patience_v;
    if (*weights) {
      config.loss_weights.clear();
      std::stringstream ss(weights_v);
      std::string item;
      while (std::getline(ss, item, ',')) config.loss_weights.push_back(std::stod(item));
    }
  }
};

void print_join_summary(std::ostream& out, const JoinSummary& s) {
  char buf[160];
  out << "P labels   #signs    train      val     test    total\n";
  std::snprintf(buf, sizeof(buf), "without   %7d  %7d  %7d  %7d  %7d\n",
                s.unmatched_signs, s.unlabeled_videos[0], s.unlabeled_videos[1],
                s.unlabeled_videos[2], s.unlabeled_total);
  out << buf;
  std::snprintf(buf, sizeof(buf), "with      %7d  %7d  %7d  %7d  %7d\n",
                s.matched_signs, s.labeled_videos[0], s.labeled_videos[1],
                s.labeled_videos[2], s.labeled_total);
  out << buf;
  std::snprintf(buf, sizeof(buf), "total     %7d  %7d  %7d  %7d  %7d\n",
                s.matched_signs + s.unmatched_signs,
                s.labeled_videos[0] + s.unlabeled_videos[0],
                s.labeled_videos[1] + s.unlabeled_videos[1],
                s.labeled_videos[2] + s.unlabeled_videos[2],
                s.labeled_total + s.unlabeled_total);
  out << buf;
  std::snprintf(buf, sizeof(buf), "coverage: %.1f%% of videos carry phoneme labels\n",
                100.0 * s.coverage);
  out << buf;
}

nlohmann::json utility_result_json(const UtilityResult& r,
                                   const PhonemeInventory& inventory,
                                   double wall_seconds) {
  return {{"subset_ids", r.subset.ids()},
          {"subset_names", r.type_names(inventory)},
          {"utility", r.utility},
          {"unique_count", r.unique_count},
          {"included_count", r.included_count},
          {"excluded_count", r.excluded_count},
          {"method", r.method == SelectMethod::Exact ? "exact" : "greedy"},
          {"wall_seconds", wall_seconds}};
}

void print_utility_result(std::ostream& out, const UtilityResult& r,
                          const PhonemeInventory& inventory, double wall_seconds) {
  char buf[64];
  out << "subset   : ";
  const auto names = r.type_names(inventory);
  if (names.empty()) out << "(empty)";
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << names[i];
  out << "\n";
  std::snprintf(buf, sizeof(buf), "%.6f", r.utility);
  out << "utility  : " << buf << "\n"
      << "unique   : " << r.unique_count << " / " << r.included_count
      << " included (" << r.excluded_count << " excluded for missing values)\n"
      << "method   : " << (r.method == SelectMethod::Exact ? "exact" : "greedy")
      << "\n";
  std::snprintf(buf, sizeof(buf), "%.3f s", wall_seconds);
  out << "wall time: " << buf << "\n";
}

nlohmann::json eval_report_json(const EvalReport& r) {
  auto triple = [](const MetricTriple& t) {
    return nlohmann::json{
        {"a1", t.a1}, {"a3", t.a3}, {"mrr", t.mrr}, {"count", t.count}};
  };
  nlohmann::json j;
  j["all"] = triple(r.all);
  j["with_labels"] = triple(r.with_labels);
  j["without_labels"] = triple(r.without_labels);
  nlohmann::json heads = nlohmann::json::object();
  for (std::size_t h = 0; h < r.head_names.size(); ++h)
    heads[r.head_names[h]] = {{"accuracy", r.phoneme_accuracy[h]},
                              {"majority_baseline", r.majority_accuracy[h]}};
  j["phoneme_heads"] = std::move(heads);
  return j;
}

void print_eval_report(std::ostream& out, const EvalReport& r) {
  char buf[128];
  out << "population       n     %A@1   %A@3    MRR\n";
  auto row = [&](const char* name, const MetricTriple& t) {
    std::snprintf(buf, sizeof(buf), "%-12s %6d   %5.1f  %5.1f   %.3f\n", name,
                  t.count, 100.0 * t.a1, 100.0 * t.a3, t.mrr);
    out << buf;
  };
  row("all", r.all);
  row("with-P", r.with_labels);
  row("without-P", r.without_labels);
  if (!r.head_names.empty()) {
    out << "phoneme heads (labeled test samples):\n";
    for (std::size_t h = 0; h < r.head_names.size(); ++h) {
      std::snprintf(buf, sizeof(buf), "  %-24s %5.1f   (majority %5.1f)\n",
                    r.head_names[h].c_str(), 100.0 * r.phoneme_accuracy[h],
                    100.0 * r.majority_accuracy[h]);
      out << buf;
    }
  }
}

SynthConfig synth_from_flags(const ExperimentConfig& base, CLI::App* cmd,
                             const SynthConfig& flags) {
  SynthConfig c = base.synth;
  auto seen = [&](const std::string& name) { return cmd->count(name) > 0; };
  if (seen("--glosses")) c.glosses = flags.glosses;
  if (seen("--cardinalities")) c.cardinalities = flags.cardinalities;
  if (seen("--videos-per-gloss")) c.videos_per_gloss = flags.videos_per_gloss;
  if (seen("--frames")) c.frames = flags.frames;
  if (seen("--keypoints")) c.keypoints = flags.keypoints;
  if (seen("--coords")) c.coords = flags.coords;
  if (seen("--sigma")) c.noise_sigma = flags.noise_sigma;
  if (seen("--coverage")) c.coverage = flags.coverage;
  if (seen("--collision-rate")) c.collision_rate = flags.collision_rate;
  if (seen("--seed")) c.seed = flags.seed;
  return c;
}

int run(int argc, char** argv) {
  CLI::App app{"phonology-aware isolated sign language recognition"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "ExperimentConfig JSON file")
      ->check(CLI::ExistingFile);

  // synth ------------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string synth_out;
  synth->add_option("--out", synth_out, "Output dataset directory")->required();
  SynthConfig synth_flags;
  std::string cards_str = "5,6,4";
  synth->add_option("--glosses", synth_flags.glosses, "Number of glosses");
  synth->add_option("--cardinalities", cards_str, "Per-type value counts");
  synth->add_option("--videos-per-gloss", synth_flags.videos_per_gloss, "");
  synth->add_option("--frames", synth_flags.frames, "Frames per clip");
  synth->add_option("--keypoints", synth_flags.keypoints, "Keypoints per frame");
  synth->add_option("--coords", synth_flags.coords, "2 or 3");
  synth->add_option("--sigma", synth_flags.noise_sigma, "Coordinate noise sd");
  synth->add_option("--coverage", synth_flags.coverage, "Labeled fraction rho");
  synth->add_option("--collision-rate", synth_flags.collision_rate,
                    "Fraction of glosses sharing a tuple");
  synth->add_option("--seed", synth_flags.seed, "Generator seed");

  // join -------------------------------------------------------------------
  auto* join = app.add_subcommand(
      "join", "Join benchmark metadata with a phonologically coded lexicon");
  std::string join_meta, join_lexicon, join_out;
  bool join_expect_asllex = false;
  FormatOption join_fmt;
  join->add_option("--metadata", join_meta, "Benchmark metadata JSON")
      ->required()->check(CLI::ExistingFile);
  join->add_option("--lexicon", join_lexicon, "Lexicon CSV/TSV")
      ->required()->check(CLI::ExistingFile);
  join->add_option("--out", join_out, "Write joined metadata JSON here");
  join->add_flag("--expect-asllex", join_expect_asllex,
                 "Assert the ASL-LEX 2.0 inventory shape");
  add_format_flag(join, join_fmt);

  // utility ----------------------------------------------------------------
  auto* utility = app.add_subcommand("utility", "Uniqueness utility of a subset");
  std::string util_lexicon, util_subset = "all";
  bool util_pairwise = false;
  FormatOption util_fmt;
  utility->add_option("--lexicon", util_lexicon)->required()->check(CLI::ExistingFile);
  utility->add_option("--subset", util_subset,
                      "none | all | comma-separated type names or ids");
  utility->add_flag("--pairwise", util_pairwise,
                    "Report the pairwise variant instead (inspection only)");
  add_format_flag(utility, util_fmt);

  // select -----------------------------------------------------------------
  auto* select = app.add_subcommand("select", "Optimal phoneme-type subset");
  std::string select_lexicon, select_method = "exact", select_nlist;
  int select_n = 2;
  FormatOption select_fmt;
  select->add_option("--lexicon", select_lexicon)->required()->check(CLI::ExistingFile);
  select->add_option("-n,--size", select_n, "Subset size");
  select->add_option("--n-list", select_nlist, "Sweep sizes, e.g. 0,2,5,9,16");
  select->add_option("--method", select_method)->check(CLI::IsMember({"exact", "greedy"}));
  add_format_flag(select, select_fmt);

  // lexicon-stats ----------------------------------------------------------
  auto* lexstats = app.add_subcommand("lexicon-stats", "Lexicon summary");
  std::string stats_lexicon;
  FormatOption stats_fmt;
  lexstats->add_option("--lexicon", stats_lexicon)->required()->check(CLI::ExistingFile);
  add_format_flag(lexstats, stats_fmt);

  // describe-inventory -----------------------------------------------------
  auto* describe = app.add_subcommand("describe-inventory",
                                      "Phoneme types, cardinalities, value tables");
  std::string desc_lexicon;
  bool desc_expect_asllex = false;
  FormatOption desc_fmt;
  describe->add_option("--lexicon", desc_lexicon)->required()->check(CLI::ExistingFile);
  describe->add_flag("--expect-asllex", desc_expect_asllex,
                     "Assert the ASL-LEX 2.0 inventory shape");
  add_format_flag(describe, desc_fmt);

  // train ------------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "Train one model");
  std::string train_data, train_subset = "none", train_ckpt, train_log;
  std::uint64_t train_seed = 0;
  ModelFlags train_flags;
  train_cmd->add_option("--data", train_data, "Dataset directory")->required();
  train_cmd->add_option("--subset", train_subset,
                        "none | all | optimal:N | type names");
  train_cmd->add_option("--out", train_ckpt, "Checkpoint path")->required();
  train_cmd->add_option("--log", train_log, "Training log (JSON lines)");
  train_cmd->add_option("--seed", train_seed, "Training seed");
  train_flags.add(train_cmd);

  // eval -------------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  std::string eval_data, eval_ckpt, eval_split = "test";
  FormatOption eval_fmt;
  eval_cmd->add_option("--data", eval_data, "Dataset directory")->required();
  eval_cmd->add_option("--checkpoint", eval_ckpt)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--split", eval_split)->check(CLI::IsMember({"train", "val", "test"}));
  add_format_flag(eval_cmd, eval_fmt);

  // experiment -------------------------------------------------------------
  auto* experiment = app.add_subcommand(
      "experiment", "Baseline vs auxiliary models over seeds, with significance");
  std::string exp_data, exp_out, exp_subset, exp_seeds, exp_sweep_sizes;
  bool exp_sweep = false;
  int exp_m = 0;
  ModelFlags exp_flags;
  experiment->add_option("--data", exp_data, "Dataset directory");
  experiment->add_option("--out", exp_out, "Output directory");
  experiment->add_option("--subset", exp_subset, "Auxiliary subset spec");
  experiment->add_option("--seeds", exp_seeds, "Comma-separated seeds");
  experiment->add_flag("--sweep", exp_sweep, "Run the subset-size sweep instead");
  experiment->add_option("--sweep-sizes", exp_sweep_sizes, "e.g. 0,2,5,9,16");
  experiment->add_option("--bonferroni-m", exp_m, "Comparisons in the family");
  exp_flags.add(experiment);

  // probe ------------------------------------------------------------------
  auto* probe = app.add_subcommand(
      "probe", "Full model vs frozen-encoder linear probe vs majority baseline");
  std::string probe_data, probe_out, probe_baseline, probe_full;
  std::uint64_t probe_seed = 0;
  ModelFlags probe_flags;
  FormatOption probe_fmt;
  probe->add_option("--data", probe_data, "Dataset directory")->required();
  probe->add_option("--out", probe_out, "Directory for probe.json / probe.csv");
  probe->add_option("--baseline-ckpt", probe_baseline,
                    "Checkpoint trained without phoneme heads");
  probe->add_option("--full-ckpt", probe_full,
                    "Checkpoint trained on all phoneme types");
  probe->add_option("--seed", probe_seed, "Training seed when training here");
  probe_flags.add(probe);
  add_format_flag(probe, probe_fmt);

  // gradcheck --------------------------------------------------------------
  auto* gradcheck_cmd = app.add_subcommand(
      "gradcheck", "Verify the backward pass against finite differences");
  double gc_tolerance = 1e-4, gc_step = 1e-5;
  gradcheck_cmd->add_option("--tolerance", gc_tolerance, "Max relative error");
  gradcheck_cmd->add_option("--step", gc_step, "Finite-difference step");

  // compare ----------------------------------------------------------------
  auto* compare = app.add_subcommand(
      "compare", "Welch's t-test between two experiment reports");
  std::string cmp_a, cmp_b, cmp_model_a = "auxiliary", cmp_model_b = "auxiliary";
  int cmp_m = 3;
  FormatOption cmp_fmt;
  compare->add_option("--a", cmp_a, "First report.json")->required()->check(CLI::ExistingFile);
  compare->add_option("--b", cmp_b, "Second report.json")->required()->check(CLI::ExistingFile);
  compare->add_option("--model-a", cmp_model_a)->check(CLI::IsMember({"baseline", "auxiliary"}));
  compare->add_option("--model-b", cmp_model_b)->check(CLI::IsMember({"baseline", "auxiliary"}));
  compare->add_option("-m,--comparisons", cmp_m, "Bonferroni family size");
  add_format_flag(compare, cmp_fmt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  ExperimentConfig config;
  if (!config_path.empty()) config = experiment_config_from_json_file(config_path);

  if (*synth) {
    if (synth->count("--cardinalities")) synth_flags.cardinalities = parse_int_list(cards_str);
    const SynthConfig c = synth_from_flags(config, synth, synth_flags);
    SynthResult result = generate_synthetic(c);
    write_dataset(result, synth_out);
    std::cout << "wrote " << result.samples.samples().size() << " videos for "
              << c.glosses << " glosses to " << synth_out << " ("
              << result.manifest.labeled_count << " labeled, coverage "
              << result.samples.coverage() << ")\n";
    return 0;
  }

  if (*join) {
    Lexicon lexicon = load_lexicon(join_lexicon);
    if (join_expect_asllex) validate_asllex_shape(lexicon.inventory());
    const auto metadata = load_metadata(join_meta);
    JoinSummary summary;
    SampleSet joined = join_datasets(metadata, lexicon, &summary);
    if (!join_out.empty()) {
      save_metadata(metadata_from_sampleset(joined), join_out);
      std::cout << "wrote joined metadata to " << join_out << "\n";
    }
    if (join_fmt.json()) {
      nlohmann::json j = {{"matched_signs", summary.matched_signs},
                          {"unmatched_signs", summary.unmatched_signs},
                          {"labeled_videos",
                           {{"train", summary.labeled_videos[0]},
                            {"val", summary.labeled_videos[1]},
                            {"test", summary.labeled_videos[2]},
                            {"total", summary.labeled_total}}},
                          {"unlabeled_videos",
                           {{"train", summary.unlabeled_videos[0]},
                            {"val", summary.unlabeled_videos[1]},
                            {"test", summary.unlabeled_videos[2]},
                            {"total", summary.unlabeled_total}}},
                          {"coverage", summary.coverage}};
      std::cout << j.dump(1) << "\n";
    } else {
      print_join_summary(std::cout, summary);
    }
    return 0;
  }

  if (*utility) {
    Lexicon lexicon = load_lexicon(util_lexicon);
    PhonemeSubset subset = resolve_subset(util_subset, lexicon);
    const auto start = std::chrono::steady_clock::now();
    UtilityResult r = compute_utility(
        lexicon, subset, util_pairwise ? UtilityKind::Pairwise : UtilityKind::Singleton);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (util_fmt.json())
      std::cout << utility_result_json(r, lexicon.inventory(), wall).dump(1) << "\n";
    else
      print_utility_result(std::cout, r, lexicon.inventory(), wall);
    return 0;
  }

  if (*select) {
    Lexicon lexicon = load_lexicon(select_lexicon);
    const SelectMethod method =
        select_method == "exact" ? SelectMethod::Exact : SelectMethod::Greedy;
    std::vector<int> sizes =
        select_nlist.empty() ? std::vector<int>{select_n} : parse_int_list(select_nlist);
    const auto start = std::chrono::steady_clock::now();
    const auto results = utility_sweep(lexicon, sizes, method);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (select_fmt.json()) {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : results)
        j.push_back(utility_result_json(r, lexicon.inventory(), wall));
      std::cout << j.dump(1) << "\n";
    } else {
      for (const auto& r : results) {
        std::cout << "--- n = " << r.subset.size() << " ---\n";
        print_utility_result(std::cout, r, lexicon.inventory(), wall);
      }
    }
    return 0;
  }

  if (*lexstats) {
    Lexicon lexicon = load_lexicon(stats_lexicon);
    const auto& inv = lexicon.inventory();
    std::vector<int> missing(inv.type_count(), 0);
    for (const Sign& s : lexicon.signs())
      for (int t = 0; t < inv.type_count(); ++t)
        if (s.phonemes[t] == kMissing) ++missing[t];
    if (stats_fmt.json()) {
      nlohmann::json types = nlohmann::json::array();
      for (int t = 0; t < inv.type_count(); ++t)
        types.push_back({{"name", inv.type(t).name},
                         {"cardinality", inv.type(t).cardinality()},
                         {"missing_rate",
                          static_cast<double>(missing[t]) / lexicon.size()}});
      nlohmann::json j = {{"signs", lexicon.size()}, {"types", std::move(types)}};
      std::cout << j.dump(1) << "\n";
    } else {
      std::cout << "signs: " << lexicon.size() << "\n";
      char buf[96];
      for (int t = 0; t < inv.type_count(); ++t) {
        std::snprintf(buf, sizeof(buf), "%-24s %3d values   missing %5.1f%%\n",
                      inv.type(t).name.c_str(), inv.type(t).cardinality(),
                      100.0 * missing[t] / lexicon.size());
        std::cout << buf;
      }
    }
    return 0;
  }

  if (*describe) {
    PhonemeInventory inv = load_inventory(desc_lexicon);
    if (desc_expect_asllex) validate_asllex_shape(inv);
    if (desc_fmt.json()) {
      nlohmann::json types = nlohmann::json::array();
      for (const PhonemeType& t : inv.types())
        types.push_back({{"id", t.id},
                         {"name", t.name},
                         {"cardinality", t.cardinality()},
                         {"values", t.value_names}});
      std::cout << nlohmann::json{{"types", std::move(types)}}.dump(1) << "\n";
    } else {
      for (const PhonemeType& t : inv.types()) {
        std::cout << "[" << t.id << "] " << t.name << " (" << t.cardinality()
                  << " values)\n    ";
        for (std::size_t v = 0; v < t.value_names.size(); ++v)
          std::cout << (v ? ", " : "") << t.value_names[v];
        std::cout << "\n";
      }
    }
    return 0;
  }

  if (*train_cmd) {
    LoadedData data = load_data_dir(train_data);
    ModelConfig mc = config.model;
    train_flags.apply(mc);
    mc.seed = train_seed;
    PhonemeSubset subset = resolve_subset(train_subset, data.lexicon);

    std::ofstream log_stream;
    if (!train_log.empty()) {
      log_stream.open(train_log);
      if (!log_stream) throw DataError("cannot write log: " + train_log);
    }
    TrainResult result = train(mc, data.samples, subset, nullptr,
                               train_log.empty() ? nullptr : &log_stream);
    Checkpoint ckpt{result.params, mc, result.heads, subset.ids()};
    save_checkpoint(ckpt, train_ckpt);
    std::cout << "best val A@1 " << result.best_val_accuracy << " at epoch "
              << result.best_epoch << " (" << result.epochs_run
              << " epochs); checkpoint written to " << train_ckpt << "\n";
    return 0;
  }

  if (*eval_cmd) {
    Checkpoint ckpt = load_checkpoint(eval_ckpt);
    LoadedData data = load_data_dir(eval_data);
    const FeatureSet features = build_features(data.samples, ckpt.config.t_model);
    EvalReport report = evaluate(ckpt.params, data.samples, features,
                                 PhonemeSubset(ckpt.subset_ids),
                                 parse_split(eval_split));
    if (eval_fmt.json())
      std::cout << eval_report_json(report).dump(1) << "\n";
    else
      print_eval_report(std::cout, report);
    return 0;
  }

  if (*experiment) {
    if (!exp_data.empty()) config.data_dir = exp_data;
    if (!exp_out.empty()) config.output_dir = exp_out;
    if (!exp_subset.empty()) config.subset_spec = exp_subset;
    if (!exp_seeds.empty()) config.seeds = parse_seed_list(exp_seeds);
    if (exp_m > 0) config.bonferroni_m = exp_m;
    if (!exp_sweep_sizes.empty()) config.sweep_sizes = parse_int_list(exp_sweep_sizes);
    exp_flags.apply(config.model);
    if (config.data_dir.empty())
      throw DataError("experiment needs --data (or data_dir in --config)");
    if (config.output_dir.empty())
      throw DataError("experiment needs --out (or output_dir in --config)");

    LoadedData data = load_data_dir(config.data_dir);
    fs::create_directories(config.output_dir);
    if (exp_sweep) {
      const auto rows = run_sweep(config, data, &std::cerr);
      std::ofstream(config.output_dir + "/sweep.json") << sweep_report_json(rows);
      std::ofstream(config.output_dir + "/sweep.txt") << sweep_report_text(rows);
      std::ofstream(config.output_dir + "/resolved_config.json")
          << experiment_config_to_json(config);
      std::cout << sweep_report_text(rows);
    } else {
      const ExperimentOutcome outcome = run_experiment(config, data, &std::cerr);
      write_experiment_outputs(outcome, config, config.output_dir);
      std::cout << experiment_report_text(outcome);
    }
    return 0;
  }

  if (*probe) {
    LoadedData data = load_data_dir(probe_data);
    ModelConfig mc = config.model;
    probe_flags.apply(mc);
    mc.seed = probe_seed;
    ExperimentConfig pc = config;
    pc.model = mc;

    TrainResult baseline, full;
    if (!probe_baseline.empty()) {
      Checkpoint ckpt = load_checkpoint(probe_baseline);
      baseline.params = ckpt.params;
      baseline.heads = ckpt.heads;
      baseline.subset = PhonemeSubset(ckpt.subset_ids);
    } else {
      std::cerr << "training baseline model (no phoneme heads)\n";
      baseline = train(mc, data.samples, PhonemeSubset());
    }
    if (!probe_full.empty()) {
      Checkpoint ckpt = load_checkpoint(probe_full);
      full.params = ckpt.params;
      full.heads = ckpt.heads;
      full.subset = PhonemeSubset(ckpt.subset_ids);
    } else {
      std::cerr << "training full multi-task model (all phoneme types)\n";
      full = train(mc, data.samples, data.lexicon.inventory().all_types());
    }

    const auto rows = run_probe(pc, data, baseline, full, &std::cerr);
    if (!probe_out.empty()) {
      fs::create_directories(probe_out);
      std::ofstream(probe_out + "/probe.json") << probe_report_json(rows);
      std::ofstream(probe_out + "/probe.csv") << probe_report_csv(rows);
    }
    std::cout << (probe_fmt.json() ? probe_report_json(rows) + "\n"
                                   : probe_report_text(rows));
    return 0;
  }

  if (*gradcheck_cmd) {
    const auto entries = run_gradcheck_grid(gc_tolerance, gc_step);
    bool all_passed = true;
    char buf[160];
    for (const auto& e : entries) {
      std::snprintf(buf, sizeof(buf), "%-52s max rel err %.3e  %s\n",
                    e.name.c_str(), e.report.max_rel_err,
                    e.report.passed ? "PASS" : "FAIL");
      std::cout << buf;
      all_passed = all_passed && e.report.passed;
    }
    if (!all_passed) throw NumericError("gradient check failed");
    return 0;
  }

  if (*compare) {
    auto load_cells = [](const std::string& path, const std::string& model) {
      std::ifstream in(path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed report " + path + ": " + e.what());
      }
      std::vector<std::vector<double>> cells;
      for (const char* metric : {"a1", "a3", "mrr"})
        cells.push_back(j.at(model).at("all").at(metric).at("per_seed")
                            .get<std::vector<double>>());
      return cells;
    };
    const auto a = load_cells(cmp_a, cmp_model_a);
    const auto b = load_cells(cmp_b, cmp_model_b);
    const char* metrics[3] = {"A@1", "A@3", "MRR"};
    nlohmann::json out = nlohmann::json::object();
    for (int i = 0; i < 3; ++i) {
      WelchResult r = welch_test(a[i], b[i], cmp_m);
      if (cmp_fmt.json()) {
        out[metrics[i]] = {{"t", r.t},         {"df", r.df},
                           {"p", r.p},         {"significant", r.significant},
                           {"degenerate", r.degenerate}};
      } else {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "%-4s t=%+.4f  df=%.2f  p=%.6f  %s%s\n", metrics[i], r.t,
                      r.df, r.p,
                      r.significant ? "significant" : "not significant",
                      r.degenerate ? " (degenerate variance)" : "");
        std::cout << buf;
      }
    }
    if (cmp_fmt.json()) std::cout << out.dump(1) << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
