#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "canline/annotations.hpp"
#include "canline/core.hpp"
#include "canline/eval.hpp"
#include "canline/ocr.hpp"
#include "canline/rng.hpp"

namespace canline {

/// Ground truth for one simulated can: fault flags, one truth box per
/// feature (easy_open, contour, label — in that order) and the true label
/// text (empty when the label itself is the fault).
struct CanInstance {
  std::uint64_t can_id = 0;
  bool easy_open_fault = false;
  bool contour_fault = false;
  bool label_fault = false;
  std::vector<GroundTruthAnnotation> truth_boxes;
  std::string label_text_truth;

  [[nodiscard]] bool has_fault() const {
    return easy_open_fault || contour_fault || label_fault;
  }
};

/// Per-feature fault probabilities.
struct FaultRates {
  double easy_open = 0.0;
  double contour = 0.0;
  double label = 0.0;

  [[nodiscard]] bool valid() const;
};

/// Error model of the synthetic detector.
struct DetectorProfile {
  double miss_rate = 0.0;             // P(truth box yields no detection)
  double false_positive_rate = 0.0;   // expected spurious detections per can
  double confusion_rate = 0.0;        // P(detection flips ok <-> fault)
  double localization_jitter = 0.0;   // coordinate noise, fraction of box size
  double tp_confidence_mean = 0.93;
  double tp_confidence_spread = 0.05;
  double fp_confidence_mean = 0.45;
  double fp_confidence_spread = 0.15;
  double nms_iou = 0.45;

  [[nodiscard]] bool valid() const;
  [[nodiscard]] static DetectorProfile perfect();
};

/// Error model of the synthetic text reader. Substitutions only swap within
/// the confusable pairs O<->0, I<->1, S<->5, B<->8.
struct OcrNoiseProfile {
  double substitution_rate = 0.0;  // per character
  double deletion_rate = 0.0;      // per character

  [[nodiscard]] bool valid() const;
};

/// The confusable partner of c, or c itself when not confusable.
[[nodiscard]] char confusable_partner(char c);

/// Draw one can: independent fault flags, one truth box per feature placed
/// inside the canonical frame, and a grammar-valid label text (empty when
/// label_fault). Throws std::invalid_argument for rates outside [0, 1].
[[nodiscard]] CanInstance generate_can(std::uint64_t can_id,
                                       const FaultRates& rates, Rng& rng);

/// Random grammar-valid label fields.
[[nodiscard]] LabelFields random_label_fields(Rng& rng);

/// Imperfect detector: each truth box survives with probability
/// 1 - miss_rate (jittered box, possibly confused class, TP-model
/// confidence); Poisson(false_positive_rate) spurious detections are added.
/// Boxes are clamped to the frame, confidences to [0, 1], and the output is
/// NMS-clean. Throws std::invalid_argument for an invalid profile.
[[nodiscard]] std::vector<Detection> mock_detect(const CanInstance& can,
                                                 const DetectorProfile& profile,
                                                 Rng& rng);

/// Imperfect reader: per character, deletion first, then confusable
/// substitution on survivors. Line confidence is 1 - errors/length; boxes
/// stack top to bottom. Throws std::invalid_argument for an invalid profile.
[[nodiscard]] std::vector<OcrLine> mock_read_text(const std::string& truth,
                                                  const OcrNoiseProfile& profile,
                                                  Rng& rng);

/// The can's truth boxes converted to the pixel frame, for evaluation.
[[nodiscard]] std::vector<GroundTruthBox> truth_boxes_px(const CanInstance& can);

}  // namespace canline
