#include <string>
#include <vector>

#include <CLI11.hpp>

#include "canline/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"canline - canned-goods inspection line simulator and "
               "detection metrics toolkit"};
  app.require_subcommand(1);

  canline::SimulateArgs sim_args;
  auto* simulate = app.add_subcommand(
      "simulate", "Run a deterministic inspection-line simulation");
  simulate->add_option("--config", sim_args.config_path,
                       "Run config file (defaults used when omitted)");
  simulate->add_option("--seed", sim_args.seed, "Random seed");
  simulate->add_option("--n", sim_args.n_cans, "Number of cans");
  simulate->add_option("--out", sim_args.out_dir, "Output directory")
      ->required();

  canline::EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Score detection files against annotation files");
  evaluate->add_option("--dets", eval_args.detections_dir,
                       "Directory of per-image detection .txt files")
      ->required();
  evaluate
      ->add_option("--annotations", eval_args.annotations_dir,
                   "Directory of per-image annotation .txt files")
      ->required();
  evaluate
      ->add_option("--names", eval_args.names_config_path,
                   "Dataset config carrying the class-name list")
      ->required();
  evaluate->add_option("--out", eval_args.out_dir, "Output directory");
  evaluate->add_option("--conf-thresh", eval_args.confidence_threshold,
                       "Confidence threshold for precision/recall");

  canline::GenDatasetArgs gen_args;
  std::vector<double> rates = {0.2, 0.2, 0.2};
  auto* gen = app.add_subcommand("gen-dataset",
                                 "Generate a synthetic labeled dataset");
  gen->add_option("--fault-rates", rates,
                  "easy_open,contour,label fault probabilities")
      ->expected(3)
      ->delimiter(',');
  gen->add_option("--n", gen_args.n_cans, "Number of cans");
  gen->add_option("--seed", gen_args.seed, "Random seed");
  gen->add_option("--ratio", gen_args.split_ratio, "Train split ratio");
  gen->add_option("--out", gen_args.out_dir, "Output directory")->required();

  canline::ReportArgs report_args;
  auto* report =
      app.add_subcommand("report", "Print a training-metrics CSV as a table");
  report->add_option("csv", report_args.csv_path, "Metrics CSV file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return canline::kExitConfig;
  }

  if (simulate->parsed()) return canline::cmd_simulate(sim_args);
  if (evaluate->parsed()) return canline::cmd_evaluate(eval_args);
  if (gen->parsed()) {
    gen_args.fault_rates = {rates[0], rates[1], rates[2]};
    return canline::cmd_gen_dataset(gen_args);
  }
  if (report->parsed()) return canline::cmd_report(report_args);
  return canline::kExitConfig;
}
