#include "canline/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace canline {

namespace {

bool is_rate(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

constexpr int kFeatureCount = 3;  // easy_open, contour, label

// Class ids in the default taxonomy: feature * 2 + (fault ? 1 : 0).
int class_id_for(int feature, bool fault) { return feature * 2 + (fault ? 1 : 0); }

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

bool FaultRates::valid() const {
  return is_rate(easy_open) && is_rate(contour) && is_rate(label);
}

bool DetectorProfile::valid() const {
  return is_rate(miss_rate) && is_rate(confusion_rate) &&
         std::isfinite(false_positive_rate) && false_positive_rate >= 0.0 &&
         std::isfinite(localization_jitter) && localization_jitter >= 0.0 &&
         std::isfinite(tp_confidence_mean) && std::isfinite(tp_confidence_spread) &&
         tp_confidence_spread >= 0.0 && std::isfinite(fp_confidence_mean) &&
         std::isfinite(fp_confidence_spread) && fp_confidence_spread >= 0.0 &&
         nms_iou > 0.0 && nms_iou < 1.0;
}

DetectorProfile DetectorProfile::perfect() {
  DetectorProfile p;
  p.tp_confidence_mean = 1.0;
  p.tp_confidence_spread = 0.0;
  return p;
}

bool OcrNoiseProfile::valid() const {
  return is_rate(substitution_rate) && is_rate(deletion_rate);
}

char confusable_partner(char c) {
  switch (c) {
    case 'O': return '0';
    case '0': return 'O';
    case 'I': return '1';
    case '1': return 'I';
    case 'S': return '5';
    case '5': return 'S';
    case 'B': return '8';
    case '8': return 'B';
    default: return c;
  }
}

LabelFields random_label_fields(Rng& rng) {
  static const char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  LabelFields fields;
  for (int i = 0; i < 6; ++i) {
    fields.lot_code.push_back(kAlphabet[rng.below(36)]);
  }
  fields.expiry_year = 2024 + static_cast<int>(rng.below(8));
  fields.expiry_month = 1 + static_cast<int>(rng.below(12));
  do {
    fields.expiry_day = 1 + static_cast<int>(rng.below(31));
  } while (!is_valid_date(fields.expiry_day, fields.expiry_month,
                          fields.expiry_year));
  for (int i = 0; i < 4; ++i) {
    fields.product_code.push_back(static_cast<char>('0' + rng.below(10)));
  }
  return fields;
}

CanInstance generate_can(std::uint64_t can_id, const FaultRates& rates,
                         Rng& rng) {
  if (!rates.valid()) {
    throw std::invalid_argument("fault rates must lie in [0, 1]");
  }
  CanInstance can;
  can.can_id = can_id;
  can.easy_open_fault = rng.bernoulli(rates.easy_open);
  can.contour_fault = rng.bernoulli(rates.contour);
  can.label_fault = rng.bernoulli(rates.label);

  const bool faults[kFeatureCount] = {can.easy_open_fault, can.contour_fault,
                                      can.label_fault};
  // Nominal geometry of a centered can seen from above: the pull ring near
  // the middle of the lid, the seam ring around it, the label strip below.
  NormalizedBox boxes[kFeatureCount];
  boxes[0].cx = 0.50 + rng.uniform(-0.03, 0.03);
  boxes[0].cy = 0.42 + rng.uniform(-0.03, 0.03);
  boxes[0].w = rng.uniform(0.16, 0.24);
  boxes[0].h = rng.uniform(0.16, 0.24);

  boxes[1].cx = 0.50 + rng.uniform(-0.02, 0.02);
  boxes[1].cy = 0.45 + rng.uniform(-0.02, 0.02);
  boxes[1].w = rng.uniform(0.55, 0.68);
  boxes[1].h = rng.uniform(0.55, 0.68);

  boxes[2].cx = 0.50 + rng.uniform(-0.04, 0.04);
  boxes[2].cy = 0.78 + rng.uniform(-0.02, 0.02);
  boxes[2].w = rng.uniform(0.40, 0.55);
  boxes[2].h = rng.uniform(0.12, 0.20);

  const auto& names = default_class_names();
  for (int f = 0; f < kFeatureCount; ++f) {
    GroundTruthAnnotation a;
    a.label = make_label(class_id_for(f, faults[f]), names);
    a.box = boxes[f];
    can.truth_boxes.push_back(a);
  }

  // A faulty label is illegible or absent; no truth text to read.
  can.label_text_truth =
      can.label_fault ? "" : render_label(random_label_fields(rng));
  return can;
}

std::vector<Detection> mock_detect(const CanInstance& can,
                                   const DetectorProfile& profile, Rng& rng) {
  if (!profile.valid()) {
    throw std::invalid_argument("invalid detector profile");
  }
  const auto& names = default_class_names();
  std::vector<Detection> dets;

  for (const auto& truth : can.truth_boxes) {
    if (rng.bernoulli(profile.miss_rate)) continue;

    Detection det;
    det.box = to_corner_form(truth.box, kImageWidth, kImageHeight);
    if (profile.localization_jitter > 0.0) {
      const double sx = profile.localization_jitter * det.box.width();
      const double sy = profile.localization_jitter * det.box.height();
      det.box.x_min += rng.normal(0.0, sx);
      det.box.x_max += rng.normal(0.0, sx);
      det.box.y_min += rng.normal(0.0, sy);
      det.box.y_max += rng.normal(0.0, sy);
      if (det.box.x_min > det.box.x_max) std::swap(det.box.x_min, det.box.x_max);
      if (det.box.y_min > det.box.y_max) std::swap(det.box.y_min, det.box.y_max);
      det.box.x_min = std::clamp(det.box.x_min, 0.0, kImageWidth);
      det.box.x_max = std::clamp(det.box.x_max, 0.0, kImageWidth);
      det.box.y_min = std::clamp(det.box.y_min, 0.0, kImageHeight);
      det.box.y_max = std::clamp(det.box.y_max, 0.0, kImageHeight);
    }

    int class_id = truth.label.id;
    if (rng.bernoulli(profile.confusion_rate)) {
      class_id ^= 1;  // flip ok <-> fault within the feature
    }
    det.label = make_label(class_id, names);
    det.confidence = clamp01(
        rng.normal(profile.tp_confidence_mean, profile.tp_confidence_spread));
    dets.push_back(det);
  }

  const std::uint64_t n_spurious = rng.poisson(profile.false_positive_rate);
  for (std::uint64_t i = 0; i < n_spurious; ++i) {
    NormalizedBox n;
    n.w = rng.uniform(0.05, 0.40);
    n.h = rng.uniform(0.05, 0.40);
    n.cx = rng.uniform(n.w / 2, 1.0 - n.w / 2);
    n.cy = rng.uniform(n.h / 2, 1.0 - n.h / 2);

    Detection det;
    det.box = to_corner_form(n, kImageWidth, kImageHeight);
    det.label = make_label(static_cast<int>(rng.below(names.size())), names);
    det.confidence = clamp01(
        rng.normal(profile.fp_confidence_mean, profile.fp_confidence_spread));
    dets.push_back(det);
  }

  return nms(dets, profile.nms_iou);
}

std::vector<OcrLine> mock_read_text(const std::string& truth,
                                    const OcrNoiseProfile& profile, Rng& rng) {
  if (!profile.valid()) {
    throw std::invalid_argument("invalid OCR noise profile");
  }
  std::vector<OcrLine> out;
  const auto truth_lines = split_text_lines(truth);
  for (std::size_t i = 0; i < truth_lines.size(); ++i) {
    const std::string& source = truth_lines[i];
    OcrLine line;
    int errors = 0;
    for (const char c : source) {
      if (rng.bernoulli(profile.deletion_rate)) {
        ++errors;
        continue;
      }
      const char partner = confusable_partner(c);
      if (partner != c && rng.bernoulli(profile.substitution_rate)) {
        line.text.push_back(partner);
        ++errors;
      } else {
        line.text.push_back(c);
      }
    }
    line.confidence =
        source.empty()
            ? 1.0
            : 1.0 - static_cast<double>(errors) / static_cast<double>(source.size());
    const double y0 = 48.0 + 40.0 * static_cast<double>(i);
    line.box = BoundingBox{64.0, std::min(y0, kImageHeight),
                           kImageWidth - 64.0, std::min(y0 + 32.0, kImageHeight)};
    out.push_back(std::move(line));
  }
  return out;
}

std::vector<GroundTruthBox> truth_boxes_px(const CanInstance& can) {
  std::vector<GroundTruthBox> out;
  out.reserve(can.truth_boxes.size());
  for (const auto& truth : can.truth_boxes) {
    out.push_back(to_pixel_truth(truth));
  }
  return out;
}

}  // namespace canline
