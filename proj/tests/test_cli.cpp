#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "canline/commands.hpp"
#include "canline/errors.hpp"
#include "canline/run_config.hpp"
#include "support.hpp"

using namespace canline;
namespace fs = std::filesystem;

TEST_CASE("run config defaults survive a write/parse round trip") {
  const RunConfig defaults;
  const std::string text = write_run_config(defaults);
  const RunConfig parsed = parse_run_config(text);
  CHECK(write_run_config(parsed) == text);
  CHECK(parsed.sim.line.confidence_threshold == 0.25);
  CHECK(parsed.sim.line.accept_bin_side == BinSide::right);
  CHECK(parsed.sim.class_names == default_class_names());
}

TEST_CASE("run config parsing errors") {
  CHECK_THROWS_AS((void)parse_run_config("no_such_key: 1\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_run_config("miss_rate: fast\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_run_config("miss_rate: 1.5\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_run_config("accept_bin_side: up\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_run_config("belt_segment_time_s: 0\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_run_config("names: []\n"), ConfigError);
}

TEST_CASE("run config accepts both names layouts") {
  const auto inline_list = parse_run_config("names: [a_ok, a_fault]\n");
  CHECK(inline_list.sim.class_names == std::vector<std::string>{"a_ok", "a_fault"});
  const auto dash_list = parse_run_config("names:\n  - a_ok\n  - a_fault\n");
  CHECK(dash_list.sim.class_names == inline_list.sim.class_names);
}

TEST_CASE("cmd_report prints the table and final summary") {
  testsupport::TempDir tmp("report");
  const auto csv = tmp.path / "metrics.csv";
  testsupport::write_file(csv, testsupport::kTrainingMetricsCsv);

  testsupport::CoutCapture capture;
  ReportArgs args;
  args.csv_path = csv.string();
  CHECK(cmd_report(args) == kExitOk);
  const std::string out = capture.text();
  CHECK(out.find("final epoch 199: precision 0.95917 recall 0.94134 map50 "
                 "0.979 map50_95 0.76313") != std::string::npos);
}

TEST_CASE("cmd_report exit codes") {
  ReportArgs missing;
  missing.csv_path = "/nonexistent/metrics.csv";
  CHECK(cmd_report(missing) == kExitConfig);

  testsupport::TempDir tmp("badreport");
  const auto csv = tmp.path / "bad.csv";
  testsupport::write_file(csv,
                          "epoch,precision,recall,map50,map50_95\n1,1.2,0,0,0\n");
  ReportArgs bad;
  bad.csv_path = csv.string();
  CHECK(cmd_report(bad) == kExitConfig);
}

TEST_CASE("cmd_gen_dataset writes the documented tree deterministically") {
  testsupport::TempDir tmp_a("gen_a");
  testsupport::TempDir tmp_b("gen_b");
  GenDatasetArgs args;
  args.n_cans = 10;
  args.seed = 4;
  args.out_dir = tmp_a.path.string();
  {
    testsupport::CoutCapture quiet;
    REQUIRE(cmd_gen_dataset(args) == kExitOk);
    args.out_dir = tmp_b.path.string();
    REQUIRE(cmd_gen_dataset(args) == kExitOk);
  }

  CHECK(fs::exists(tmp_a.path / "labels" / "can_000001.txt"));
  CHECK(fs::exists(tmp_a.path / "manifest.jsonl"));
  CHECK(fs::exists(tmp_a.path / "dataset.yaml"));

  // 80/20 split of ten cans
  const auto train = testsupport::read_file(tmp_a.path / "train.txt");
  const auto val = testsupport::read_file(tmp_a.path / "val.txt");
  CHECK(std::count(train.begin(), train.end(), '\n') == 8);
  CHECK(std::count(val.begin(), val.end(), '\n') == 2);

  // identical seed, identical trees
  for (const char* name : {"manifest.jsonl", "train.txt", "val.txt", "dataset.yaml"}) {
    CHECK(testsupport::read_file(tmp_a.path / name) ==
          testsupport::read_file(tmp_b.path / name));
  }
  for (int i = 1; i <= 10; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "can_%06d.txt", i);
    CHECK(testsupport::read_file(tmp_a.path / "labels" / stem) ==
          testsupport::read_file(tmp_b.path / "labels" / stem));
  }

  // manifest rows carry the fault flags
  const auto manifest = testsupport::read_file(tmp_a.path / "manifest.jsonl");
  const auto first = nlohmann::json::parse(manifest.substr(0, manifest.find('\n')));
  CHECK(first.contains("can"));
  CHECK(first.contains("label_fault"));
}

TEST_CASE("cmd_gen_dataset rejects bad rates") {
  GenDatasetArgs args;
  args.fault_rates = FaultRates{1.5, 0.2, 0.2};
  args.out_dir = "/tmp/unused_canline_dir";
  CHECK(cmd_gen_dataset(args) == kExitConfig);
}

TEST_CASE("cmd_simulate writes manifest, logs, summary and telemetry") {
  testsupport::TempDir tmp("simulate");
  SimulateArgs args;
  args.seed = 11;
  args.n_cans = 25;
  args.out_dir = (tmp.path / "run").string();
  {
    testsupport::CoutCapture quiet;
    REQUIRE(cmd_simulate(args) == kExitOk);
  }

  const fs::path run(args.out_dir);
  for (const char* name :
       {"manifest.json", "events.jsonl", "summary.json", "telemetry.tsv"}) {
    CHECK(fs::exists(run / name));
  }

  const auto manifest = nlohmann::json::parse(testsupport::read_file(run / "manifest.json"));
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["seed"] == 11);
  CHECK(manifest["config"].get<std::string>().find("confidence_threshold") !=
        std::string::npos);

  const auto summary = nlohmann::json::parse(testsupport::read_file(run / "summary.json"));
  CHECK(summary["n_cans"] == 25);
  CHECK(summary["accepted"].get<int>() + summary["rejected"].get<int>() == 25);
  CHECK(summary["telemetry"]["dropped"] == 0);

  // 25 verdict lines in the telemetry capture
  const auto sink_lines = testsupport::read_file(run / "telemetry.tsv");
  std::size_t verdicts = 0, pos = 0;
  while ((pos = sink_lines.find("/verdict\t", pos)) != std::string::npos) {
    ++verdicts;
    ++pos;
  }
  CHECK(verdicts == 25);
}

TEST_CASE("cmd_simulate honors a config file and rejects a missing one") {
  testsupport::TempDir tmp("simcfg");
  const auto config_path = tmp.path / "run.conf";
  testsupport::write_file(config_path,
                          "line_id: L7\n"
                          "fault_rate_easy_open: 0\n"
                          "fault_rate_contour: 0\n"
                          "fault_rate_label: 0\n");
  SimulateArgs args;
  args.config_path = config_path.string();
  args.n_cans = 5;
  args.out_dir = (tmp.path / "run").string();
  {
    testsupport::CoutCapture quiet;
    REQUIRE(cmd_simulate(args) == kExitOk);
  }
  const auto sink = testsupport::read_file(tmp.path / "run" / "telemetry.tsv");
  CHECK(sink.find("canline/v1/L7/") != std::string::npos);

  SimulateArgs missing;
  missing.config_path = (tmp.path / "no_such.conf").string();
  missing.out_dir = (tmp.path / "run2").string();
  testsupport::CoutCapture quiet;
  CHECK(cmd_simulate(missing) == kExitConfig);
}

TEST_CASE("cmd_evaluate scores a hand-built scene") {
  testsupport::TempDir tmp("eval");
  const auto annotations = tmp.path / "annotations";
  const auto detections = tmp.path / "detections";
  fs::create_directories(annotations);
  fs::create_directories(detections);
  const auto names_path = tmp.path / "dataset.yaml";
  testsupport::write_file(names_path, "train: t\nval: v\nnames: [thing_ok]\n");

  // Two truths; detections ranked TP 0.9, FP 0.8, TP 0.7 -> AP 5/6.
  testsupport::write_file(annotations / "img1.txt",
                          "0 0.200000 0.200000 0.200000 0.200000\n"
                          "0 0.500000 0.500000 0.200000 0.200000\n");
  testsupport::write_file(detections / "img1.txt",
                          "0 0.200000 0.200000 0.200000 0.200000 0.900000\n"
                          "0 0.800000 0.800000 0.100000 0.100000 0.800000\n"
                          "0 0.500000 0.500000 0.200000 0.200000 0.700000\n");

  EvaluateArgs args;
  args.annotations_dir = annotations.string();
  args.detections_dir = detections.string();
  args.names_config_path = names_path.string();
  args.out_dir = (tmp.path / "out").string();
  {
    testsupport::CoutCapture quiet;
    REQUIRE(cmd_evaluate(args) == kExitOk);
  }

  const auto metrics =
      nlohmann::json::parse(testsupport::read_file(fs::path(args.out_dir) / "metrics.json"));
  CHECK(std::abs(metrics["map50"].get<double>() - 5.0 / 6.0) <= 1e-9);
  CHECK(metrics["num_ground_truths"] == 2);
  CHECK(metrics["num_detections"] == 3);
  CHECK(metrics["per_class_ap"].contains("thing_ok"));
  CHECK(fs::exists(fs::path(args.out_dir) / "pr_curve.csv"));
  CHECK(fs::exists(fs::path(args.out_dir) / "confidence_precision.csv"));
}

TEST_CASE("cmd_evaluate: identical detections give map50 = 1") {
  testsupport::TempDir tmp("evalperfect");
  const auto annotations = tmp.path / "annotations";
  const auto detections = tmp.path / "detections";
  fs::create_directories(annotations);
  fs::create_directories(detections);
  const auto names_path = tmp.path / "names.yaml";
  testsupport::write_file(names_path, "names: [a_ok, a_fault]\n");

  testsupport::write_file(annotations / "img1.txt",
                          "0 0.300000 0.300000 0.200000 0.200000\n"
                          "1 0.700000 0.700000 0.200000 0.200000\n");
  testsupport::write_file(detections / "img1.txt",
                          "0 0.300000 0.300000 0.200000 0.200000 1.000000\n"
                          "1 0.700000 0.700000 0.200000 0.200000 1.000000\n");

  EvaluateArgs args;
  args.annotations_dir = annotations.string();
  args.detections_dir = detections.string();
  args.names_config_path = names_path.string();
  args.out_dir = (tmp.path / "out").string();
  {
    testsupport::CoutCapture quiet;
    REQUIRE(cmd_evaluate(args) == kExitOk);
  }
  const auto metrics =
      nlohmann::json::parse(testsupport::read_file(fs::path(args.out_dir) / "metrics.json"));
  CHECK(metrics["map50"] == 1.0);
  CHECK(metrics["map50_95"] == 1.0);
  CHECK(metrics["precision"] == 1.0);
  CHECK(metrics["recall"] == 1.0);
}

TEST_CASE("cmd_evaluate exit codes") {
  testsupport::TempDir tmp("evalerr");
  const auto annotations = tmp.path / "annotations";
  const auto detections = tmp.path / "detections";
  fs::create_directories(annotations);
  fs::create_directories(detections);
  const auto names_path = tmp.path / "names.yaml";
  testsupport::write_file(names_path, "names: [a_ok]\n");

  EvaluateArgs args;
  args.annotations_dir = annotations.string();  // empty: no ground truth
  args.detections_dir = detections.string();
  args.names_config_path = names_path.string();
  args.out_dir = (tmp.path / "out").string();
  CHECK(cmd_evaluate(args) == kExitConfig);

  // class id outside the name list
  testsupport::write_file(annotations / "img1.txt", "3 0.5 0.5 0.2 0.2\n");
  CHECK(cmd_evaluate(args) == kExitConfig);

  args.names_config_path = (tmp.path / "missing.yaml").string();
  CHECK(cmd_evaluate(args) == kExitConfig);
}
