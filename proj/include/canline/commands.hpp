#pragma once

#include <cstdint>
#include <string>

#include "canline/synthetic.hpp"

namespace canline {

inline constexpr const char* kArtifactVersion = "1.0.0";

// Exit codes shared by every subcommand: 0 success, 2 usage/config/parse
// error, 3 I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

struct SimulateArgs {
  std::string config_path;  // empty -> built-in defaults
  std::uint64_t seed = 1;
  std::uint64_t n_cans = 100;
  std::string out_dir;
};

struct EvaluateArgs {
  std::string detections_dir;
  std::string annotations_dir;
  std::string names_config_path;
  std::string out_dir = ".";
  double confidence_threshold = 0.25;
};

struct GenDatasetArgs {
  FaultRates fault_rates{0.2, 0.2, 0.2};
  std::uint64_t n_cans = 100;
  std::uint64_t seed = 1;
  std::string out_dir;
  double split_ratio = 0.8;
};

struct ReportArgs {
  std::string csv_path;
};

/// Run a full line simulation; writes manifest.json, events.jsonl,
/// summary.json and telemetry.tsv under out_dir.
int cmd_simulate(const SimulateArgs& args);

/// Score a detections directory against an annotations directory; writes
/// metrics.json, pr_curve.csv and confidence_precision.csv under out_dir.
int cmd_evaluate(const EvaluateArgs& args);

/// Generate a synthetic labeled dataset: labels/, manifest.jsonl,
/// train.txt / val.txt and dataset.yaml under out_dir.
int cmd_gen_dataset(const GenDatasetArgs& args);

/// Print a training-metrics CSV as a table with a final-epoch summary.
int cmd_report(const ReportArgs& args);

}  // namespace canline
