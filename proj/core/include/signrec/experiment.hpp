#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "signrec/metrics.hpp"
#include "signrec/synthetic.hpp"
#include "signrec/train.hpp"
#include "signrec/utility.hpp"

namespace signrec {

struct ExperimentConfig {
  std::string data_dir;    // expects lexicon.csv, metadata.json, poses/
  std::string output_dir;
  std::string subset_spec = "optimal:2";  // "none" | "optimal:N" | type names
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3};
  ModelConfig model;
  int bonferroni_m = 3;
  std::vector<int> sweep_sizes = {0, 2, 5, 9, 16};
  SynthConfig synth;  // used by the synth command only
};

struct LoadedData {
  Lexicon lexicon;
  SampleSet samples;
};

// Reads <dir>/lexicon.csv, <dir>/metadata.json and <dir>/poses/*.pose.
LoadedData load_data_dir(const std::string& dir, bool with_poses = true);

// Writes lexicon.csv, metadata.json, poses/ and manifest.json.
void write_dataset(const SynthResult& synth, const std::string& dir);

// "none" -> empty subset; "optimal:N" -> exact selection on the lexicon;
// otherwise comma-separated type names or ids. The resolution is described
// in *note when given.
PhonemeSubset resolve_subset(const std::string& spec, const Lexicon& lexicon,
                             std::string* note = nullptr);

// One Table-2-style run: per seed, a baseline model (no phoneme heads) and an
// auxiliary model on the active subset, both evaluated on the test split.
struct ExperimentOutcome {
  PhonemeSubset subset;
  std::vector<std::string> subset_names;
  AggregateReport baseline;
  AggregateReport auxiliary;
  WelchResult significance[3];  // A@1, A@3, MRR on the "all" population
};

ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const LoadedData& data,
                                 std::ostream* progress = nullptr);

// report.json (deterministic), report.txt, resolved_config.json
void write_experiment_outputs(const ExperimentOutcome& outcome,
                              const ExperimentConfig& config,
                              const std::string& out_dir);

std::string experiment_report_json(const ExperimentOutcome& outcome,
                                   const ExperimentConfig& config);
std::string experiment_report_text(const ExperimentOutcome& outcome);

// Subset-size sweep mirroring the top-n protocol: models trained on the
// labeled-only training videos and evaluated on the labeled validation
// videos, one row per n.
struct SweepRow {
  int n = 0;
  PhonemeSubset subset;
  std::vector<std::string> subset_names;
  double utility = 0.0;
  MeanSd a1, a3, mrr;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& config,
                                const LoadedData& data,
                                std::ostream* progress = nullptr);

std::string sweep_report_json(const std::vector<SweepRow>& rows);
std::string sweep_report_text(const std::vector<SweepRow>& rows);

// Per-type comparison: full multi-task model vs a linear probe on the frozen
// baseline encoder vs the majority baseline.
struct ProbeRow {
  std::string type_name;
  double full_model = 0.0;
  double probe = 0.0;
  double majority = 0.0;
};

std::vector<ProbeRow> run_probe(const ExperimentConfig& config,
                                const LoadedData& data,
                                const TrainResult& baseline,
                                const TrainResult& full,
                                std::ostream* progress = nullptr);

std::string probe_report_json(const std::vector<ProbeRow>& rows);
std::string probe_report_text(const std::vector<ProbeRow>& rows);
std::string probe_report_csv(const std::vector<ProbeRow>& rows);

// ExperimentConfig <-> JSON (the CLI --config file format).
ExperimentConfig experiment_config_from_json_file(const std::string& path);
std::string experiment_config_to_json(const ExperimentConfig& config);

}  // namespace signrec
