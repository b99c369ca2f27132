#include "canline/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "canline/errors.hpp"
#include "canline/eval.hpp"
#include "canline/line.hpp"
#include "canline/run_config.hpp"
#include "canline/telemetry.hpp"

namespace fs = std::filesystem;

namespace canline {

namespace {

// Input files that fail to open are a configuration problem (exit 2);
// output failures are I/O problems (exit 3).
std::string read_input_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file: " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

int run_command(const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

nlohmann::ordered_json manifest_json(const std::string& command,
                                     std::uint64_t seed, std::uint64_t n,
                                     const std::string& out_dir,
                                     const nlohmann::ordered_json& outputs,
                                     const std::string& config_text) {
  nlohmann::ordered_json j;
  j["v"] = 1;
  j["artifact"] = "canline";
  j["version"] = kArtifactVersion;
  j["command"] = command;
  j["seed"] = seed;
  j["n"] = n;
  j["out_dir"] = out_dir;
  j["outputs"] = outputs;
  j["config"] = config_text;
  return j;
}

std::string can_stem(std::uint64_t can_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "can_%06llu",
                static_cast<unsigned long long>(can_id));
  return buf;
}

// stem -> file contents for every .txt file in dir, sorted by stem.
std::vector<std::pair<std::string, std::string>> read_txt_dir(
    const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw ConfigError("not a directory: " + dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : files) {
    out.emplace_back(f.stem().string(), read_input_file(f.string()));
  }
  return out;
}

}  // namespace

int cmd_simulate(const SimulateArgs& args) {
  return run_command([&] {
    RunConfig config;
    std::string config_text;
    if (!args.config_path.empty()) {
      config_text = read_input_file(args.config_path);
      config = parse_run_config(config_text);
    } else {
      config_text = write_run_config(config);
    }

    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);

    // Manifest goes first: a run is reproducible from it alone.
    const auto outputs = nlohmann::ordered_json{{"events", "events.jsonl"},
                                                {"summary", "summary.json"},
                                                {"telemetry", "telemetry.tsv"}};
    write_output_file(out_dir / "manifest.json",
                      manifest_json("simulate", args.seed, args.n_cans,
                                    args.out_dir, outputs, config_text)
                              .dump(2) +
                          "\n");

    const fs::path sink_path = out_dir / "telemetry.tsv";
    fs::remove(sink_path);  // the sink appends; start each run clean
    FileSink sink(sink_path.string());
    TelemetryPublisher publisher(config.sim.line.line_id, &sink);

    const SimulationResult result =
        run_simulation(config.sim, args.n_cans, args.seed, &publisher);

    std::string events_text;
    for (const auto& event : result.events) {
      events_text += event_to_jsonl(event);
      events_text += '\n';
    }
    write_output_file(out_dir / "events.jsonl", events_text);
    write_output_file(out_dir / "summary.json",
                      result.summary.to_json().dump(2) + "\n");

    std::cout << "simulated " << result.summary.n_cans << " cans: "
              << result.summary.bins.accepted << " accepted, "
              << result.summary.bins.rejected << " rejected; "
              << format_number(result.summary.throughput_cans_per_min)
              << " cans/min (outputs in " << args.out_dir << ")\n";
    if (result.summary.telemetry_dropped > 0) {
      std::cout << "telemetry: " << result.summary.telemetry_dropped
                << " events dropped (" << result.summary.telemetry_error << ")\n";
    }
  });
}

int cmd_evaluate(const EvaluateArgs& args) {
  return run_command([&] {
    const auto names = parse_names_config(read_input_file(args.names_config_path));

    const auto annotation_files = read_txt_dir(args.annotations_dir);
    const auto detection_files = read_txt_dir(args.detections_dir);

    std::map<std::string, std::vector<GroundTruthAnnotation>> gts_by_stem;
    for (const auto& [stem, text] : annotation_files) {
      auto annos = parse_annotation_text(text);
      bind_class_names(annos, names);
      gts_by_stem.emplace(stem, std::move(annos));
    }
    std::map<std::string, std::vector<NormalizedDetection>> dets_by_stem;
    for (const auto& [stem, text] : detection_files) {
      auto dets = parse_detection_text(text);
      bind_class_names(dets, names);
      dets_by_stem.emplace(stem, std::move(dets));
    }

    std::vector<std::string> stems;
    for (const auto& [stem, annos] : gts_by_stem) stems.push_back(stem);
    for (const auto& [stem, dets] : dets_by_stem) {
      if (!gts_by_stem.count(stem)) stems.push_back(stem);
    }
    std::sort(stems.begin(), stems.end());

    std::vector<EvalScene> scenes;
    std::size_t n_dets = 0, n_gts = 0;
    for (const auto& stem : stems) {
      EvalScene scene;
      if (const auto it = gts_by_stem.find(stem); it != gts_by_stem.end()) {
        for (const auto& a : it->second) scene.ground_truths.push_back(to_pixel_truth(a));
      }
      if (const auto it = dets_by_stem.find(stem); it != dets_by_stem.end()) {
        for (const auto& d : it->second) {
          Detection det;
          det.box = to_corner_form(d.box, kImageWidth, kImageHeight);
          det.label = d.label;
          det.confidence = d.confidence;
          scene.detections.push_back(std::move(det));
        }
      }
      n_dets += scene.detections.size();
      n_gts += scene.ground_truths.size();
      scenes.push_back(std::move(scene));
    }

    const double map50 = map_at(scenes, 0.5);  // throws on empty ground truth
    const double map50_95 = map_range(scenes);
    const auto class_ap = per_class_ap(scenes, 0.5);
    const MatchOutcome pooled = pooled_outcome(scenes, 0.5);

    // Precision/recall at the confidence threshold, IoU 0.5, micro-pooled.
    int tp = 0, kept = 0;
    for (const auto& r : pooled.ranked) {
      if (r.confidence < args.confidence_threshold) break;
      ++kept;
      if (r.true_positive) ++tp;
    }
    const double precision = kept > 0 ? static_cast<double>(tp) / kept : 0.0;
    const double recall =
        pooled.num_gt > 0 ? static_cast<double>(tp) / pooled.num_gt : 0.0;

    nlohmann::ordered_json metrics;
    metrics["v"] = 1;
    metrics["confidence_threshold"] = args.confidence_threshold;
    metrics["iou_threshold"] = 0.5;
    metrics["num_images"] = stems.size();
    metrics["num_ground_truths"] = n_gts;
    metrics["num_detections"] = n_dets;
    metrics["precision"] = precision;
    metrics["recall"] = recall;
    metrics["map50"] = map50;
    metrics["map50_95"] = map50_95;
    auto per_class = nlohmann::ordered_json::object();
    for (const auto& [class_id, ap] : class_ap) {
      per_class[names[static_cast<std::size_t>(class_id)]] = ap;
    }
    metrics["per_class_ap"] = std::move(per_class);

    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);

    nlohmann::ordered_json manifest;
    manifest["v"] = 1;
    manifest["artifact"] = "canline";
    manifest["version"] = kArtifactVersion;
    manifest["command"] = "evaluate";
    manifest["inputs"] = {{"detections", args.detections_dir},
                          {"annotations", args.annotations_dir},
                          {"names", args.names_config_path}};
    manifest["confidence_threshold"] = args.confidence_threshold;
    manifest["outputs"] = {{"metrics", "metrics.json"},
                           {"pr_curve", "pr_curve.csv"},
                           {"confidence_precision", "confidence_precision.csv"}};
    write_output_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

    write_output_file(out_dir / "metrics.json", metrics.dump(2) + "\n");

    std::string pr_csv = "recall,precision\n";
    for (const auto& p : pr_curve(pooled)) {
      pr_csv += format_number(p.recall) + "," + format_number(p.precision) + "\n";
    }
    write_output_file(out_dir / "pr_curve.csv", pr_csv);

    std::string cp_csv = "confidence,precision\n";
    for (const auto& p : precision_confidence_curve(pooled)) {
      cp_csv += format_number(p.confidence) + "," + format_number(p.precision) + "\n";
    }
    write_output_file(out_dir / "confidence_precision.csv", cp_csv);

    std::cout << "images " << stems.size() << "  gts " << n_gts << "  dets "
              << n_dets << "\n";
    std::cout << "precision " << format_number(precision) << "  recall "
              << format_number(recall) << "  (conf >= "
              << format_number(args.confidence_threshold) << ", IoU 0.5)\n";
    std::cout << "map50 " << format_number(map50) << "  map50_95 "
              << format_number(map50_95) << "\n";
    for (const auto& [class_id, ap] : class_ap) {
      std::cout << "ap50[" << names[static_cast<std::size_t>(class_id)]
                << "] " << format_number(ap) << "\n";
    }
  });
}

int cmd_gen_dataset(const GenDatasetArgs& args) {
  return run_command([&] {
    if (!args.fault_rates.valid()) {
      throw ConfigError("fault rates must lie in [0, 1]");
    }
    if (args.n_cans == 0) throw ConfigError("need at least one can");

    const fs::path out_dir(args.out_dir);
    const fs::path labels_dir = out_dir / "labels";
    fs::create_directories(labels_dir);

    const auto outputs =
        nlohmann::ordered_json{{"labels", "labels/"},
                               {"manifest", "manifest.jsonl"},
                               {"train", "train.txt"},
                               {"val", "val.txt"},
                               {"dataset", "dataset.yaml"}};
    nlohmann::ordered_json manifest =
        manifest_json("gen-dataset", args.seed, args.n_cans, args.out_dir,
                      outputs, "");
    manifest["fault_rates"] = {args.fault_rates.easy_open,
                               args.fault_rates.contour,
                               args.fault_rates.label};
    manifest["split_ratio"] = args.split_ratio;
    write_output_file(out_dir / "run_manifest.json", manifest.dump(2) + "\n");

    std::string can_manifest;
    std::vector<std::string> stems;
    for (std::uint64_t can_id = 1; can_id <= args.n_cans; ++can_id) {
      Rng rng = Rng::substream(args.seed, can_id);
      const CanInstance can = generate_can(can_id, args.fault_rates, rng);
      const std::string stem = can_stem(can_id);
      write_output_file(labels_dir / (stem + ".txt"),
                        write_annotation_file(can.truth_boxes));

      nlohmann::ordered_json row;
      row["can"] = can.can_id;
      row["easy_open_fault"] = can.easy_open_fault;
      row["contour_fault"] = can.contour_fault;
      row["label_fault"] = can.label_fault;
      row["label_text"] = can.label_text_truth;
      can_manifest += row.dump();
      can_manifest += '\n';
      stems.push_back(stem);
    }
    write_output_file(out_dir / "manifest.jsonl", can_manifest);

    const DatasetSplit split = split_dataset(stems, args.split_ratio, args.seed);
    std::string train_text, val_text;
    for (const auto& s : split.train) train_text += s + "\n";
    for (const auto& s : split.val) val_text += s + "\n";
    write_output_file(out_dir / "train.txt", train_text);
    write_output_file(out_dir / "val.txt", val_text);

    DatasetConfig dataset;
    dataset.train_path = "train.txt";
    dataset.val_path = "val.txt";
    dataset.class_names = default_class_names();
    write_output_file(out_dir / "dataset.yaml", write_dataset_config(dataset));

    std::cout << "generated " << args.n_cans << " cans (" << split.train.size()
              << " train / " << split.val.size() << " val) in " << args.out_dir
              << "\n";
  });
}

int cmd_report(const ReportArgs& args) {
  return run_command([&] {
    const auto rows = ingest_metrics_table(read_input_file(args.csv_path));
    std::cout << format_metrics_table(rows);
  });
}

}  // namespace canline
