#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "canline/annotations.hpp"
#include "canline/core.hpp"

namespace canline {

/// Ground truth in the pixel frame, the form the matcher consumes.
struct GroundTruthBox {
  ClassLabel label;
  BoundingBox box;
};

[[nodiscard]] GroundTruthBox to_pixel_truth(const GroundTruthAnnotation& a,
                                            double img_w = kImageWidth,
                                            double img_h = kImageHeight);

/// One detection after matching: rank source (confidence), class, TP flag.
struct RankedDetection {
  double confidence = 0.0;
  int class_id = -1;
  bool true_positive = false;
};

/// Match result for a set of detections against a set of ground truths.
/// `ranked` is ordered by descending confidence (ties keep input order).
struct MatchOutcome {
  std::vector<RankedDetection> ranked;
  int num_gt = 0;

  [[nodiscard]] int tp_count() const;
  [[nodiscard]] int fp_count() const {
    return static_cast<int>(ranked.size()) - tp_count();
  }
  [[nodiscard]] int fn_count() const { return num_gt - tp_count(); }
};

/// One sample of the precision/recall curve.
struct PRPoint {
  double recall = 0.0;
  double precision = 0.0;
  double confidence = 0.0;
};

struct ConfidencePrecisionPoint {
  double confidence = 0.0;
  double precision = 0.0;
};

/// One row of a training-metrics table.
struct MetricsReport {
  int epoch = 0;
  double precision = 0.0;
  double recall = 0.0;
  double map50 = 0.0;
  double map50_95 = 0.0;
};

/// Detections and ground truths of one image.
struct EvalScene {
  std::vector<Detection> detections;
  std::vector<GroundTruthBox> ground_truths;
};

/// Intersection over union; 0 when the union has zero area.
[[nodiscard]] double iou(const BoundingBox& a, const BoundingBox& b);

/// Greedy class-wise non-maximum suppression. Keeps the highest-confidence
/// detection and drops same-class detections with IoU >= iou_thresh against
/// a kept one. Output sorted by descending confidence.
[[nodiscard]] std::vector<Detection> nms(const std::vector<Detection>& dets,
                                         double iou_thresh);

/// Greedy matching, descending confidence: each detection takes the unmatched
/// same-class ground truth with the highest IoU >= iou_thresh (IoU ties go to
/// the lowest ground-truth index). Class identity is the label id.
[[nodiscard]] MatchOutcome match_detections(
    const std::vector<Detection>& dets,
    const std::vector<GroundTruthBox>& gts, double iou_thresh);

/// One point per rank k: precision = TP@k / k, recall = TP@k / num_gt
/// (recall 0 when num_gt = 0).
[[nodiscard]] std::vector<PRPoint> pr_curve(
    const std::vector<RankedDetection>& ranked, int num_gt);

[[nodiscard]] inline std::vector<PRPoint> pr_curve(const MatchOutcome& outcome) {
  return pr_curve(outcome.ranked, outcome.num_gt);
}

/// All-points interpolated average precision: precision is replaced by the
/// maximum precision at equal-or-higher recall, then integrated over recall
/// from 0 to the maximum recall reached.
[[nodiscard]] double average_precision(const std::vector<PRPoint>& curve);

/// Per-image matching pooled per class across scenes (ranked by descending
/// confidence; ties by scene order then input order). Keys are class ids of
/// classes with at least one ground truth.
[[nodiscard]] std::map<int, MatchOutcome> per_class_outcomes(
    const std::vector<EvalScene>& scenes, double iou_thresh);

/// All classes pooled into one ranking (micro view, used for aggregate
/// curves). Detections whose class has no ground truth pool as FP.
[[nodiscard]] MatchOutcome pooled_outcome(const std::vector<EvalScene>& scenes,
                                          double iou_thresh);

/// AP per class with at least one ground truth.
[[nodiscard]] std::map<int, double> per_class_ap(
    const std::vector<EvalScene>& scenes, double iou_thresh);

/// Mean AP over classes with >= 1 ground truth. Throws canline::Error
/// ("empty ground truth") when no class has any.
[[nodiscard]] double map_at(const std::vector<EvalScene>& scenes,
                            double iou_thresh);

/// The ten IoU thresholds 0.50, 0.55, ..., 0.95.
[[nodiscard]] std::array<double, 10> map_iou_thresholds();

/// Mean of map_at over map_iou_thresholds().
[[nodiscard]] double map_range(const std::vector<EvalScene>& scenes);

/// For each distinct confidence c in the ranking, precision over detections
/// with confidence >= c.
[[nodiscard]] std::vector<ConfidencePrecisionPoint> precision_confidence_curve(
    const MatchOutcome& outcome);

/// Per-class variant of precision_confidence_curve.
[[nodiscard]] std::map<int, std::vector<ConfidencePrecisionPoint>>
precision_confidence_curve_per_class(const MatchOutcome& outcome);

/// Parse the `epoch,precision,recall,map50,map50_95` CSV. Fractions are
/// range-checked; malformed rows raise ParseError with the row's line number.
[[nodiscard]] std::vector<MetricsReport> ingest_metrics_table(
    const std::string& csv_text);

/// Fixed-width table plus a final-epoch summary line. Values are printed
/// with shortest round-trip formatting, so they match the source text.
[[nodiscard]] std::string format_metrics_table(
    const std::vector<MetricsReport>& reports);

/// Shortest decimal representation that parses back to the same double.
[[nodiscard]] std::string format_number(double v);

}  // namespace canline
