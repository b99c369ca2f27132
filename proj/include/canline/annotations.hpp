#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "canline/core.hpp"

namespace canline {

/// One labeled truth box in YOLO-normalized coordinates.
struct GroundTruthAnnotation {
  ClassLabel label;
  NormalizedBox box;

  friend bool operator==(const GroundTruthAnnotation&,
                         const GroundTruthAnnotation&) = default;
};

/// Detector output in file form: normalized box plus confidence.
struct NormalizedDetection {
  ClassLabel label;
  NormalizedBox box;
  double confidence = 0.0;

  friend bool operator==(const NormalizedDetection&,
                         const NormalizedDetection&) = default;
};

/// Parsed dataset config: train/val paths and the ordered class-name list.
struct DatasetConfig {
  std::string train_path;
  std::string val_path;
  std::vector<std::string> class_names;
};

/// Deterministic train/val partition of item ids.
struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
  double ratio = 0.0;
};

/// Parse one `class_id cx cy w h` annotation line. Coordinates within 1e-6 of
/// [0, 1] are clamped; anything further out is rejected. Throws ParseError
/// with `line_no` and a reason on malformed input.
[[nodiscard]] GroundTruthAnnotation parse_annotation_line(
    const std::string& line, int line_no = 1);

/// Parse a whole annotation file body; blank lines are ignored.
[[nodiscard]] std::vector<GroundTruthAnnotation> parse_annotation_text(
    const std::string& text);

/// Emit one `class_id cx cy w h` line per annotation, 6 decimal places,
/// newline-terminated. parse_annotation_text inverts it.
[[nodiscard]] std::string write_annotation_file(
    const std::vector<GroundTruthAnnotation>& annotations);

/// Parse one `class_id cx cy w h confidence` detection line (the layout
/// detector prediction dumps use).
[[nodiscard]] NormalizedDetection parse_detection_line(const std::string& line,
                                                       int line_no = 1);

[[nodiscard]] std::vector<NormalizedDetection> parse_detection_text(
    const std::string& text);

[[nodiscard]] std::string write_detection_file(
    const std::vector<NormalizedDetection>& detections);

/// Resolve label names against `names`; throws ConfigError for ids out of
/// range.
void bind_class_names(std::vector<GroundTruthAnnotation>& annotations,
                      const std::vector<std::string>& names);
void bind_class_names(std::vector<NormalizedDetection>& detections,
                      const std::vector<std::string>& names);

/// Deterministic shuffled split: first round(ratio * N) ids go to train.
/// Throws std::invalid_argument for an empty input, duplicate ids, or a
/// ratio outside (0, 1).
[[nodiscard]] DatasetSplit split_dataset(
    const std::vector<std::string>& item_ids, double ratio,
    std::uint64_t seed);

/// Parse the flat `train:` / `val:` / `names:` dataset config. Class ids are
/// list positions. Throws ConfigError naming the offending key.
[[nodiscard]] DatasetConfig parse_dataset_config(const std::string& text);

/// Like parse_dataset_config but only `names:` is required (evaluation only
/// needs the class list).
[[nodiscard]] std::vector<std::string> parse_names_config(
    const std::string& text);

/// Canonical dataset-config rendering; parse_dataset_config inverts it.
[[nodiscard]] std::string write_dataset_config(const DatasetConfig& config);

}  // namespace canline
