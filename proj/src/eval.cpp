#include "canline/eval.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "canline/errors.hpp"

namespace canline {

GroundTruthBox to_pixel_truth(const GroundTruthAnnotation& a, double img_w,
                              double img_h) {
  return GroundTruthBox{a.label, to_corner_form(a.box, img_w, img_h)};
}

int MatchOutcome::tp_count() const {
  return static_cast<int>(
      std::count_if(ranked.begin(), ranked.end(),
                    [](const RankedDetection& r) { return r.true_positive; }));
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = area(a) + area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

namespace {

// Indices sorted by descending confidence; ties keep input order.
std::vector<std::size_t> rank_by_confidence(const std::vector<Detection>& dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return dets[a].confidence > dets[b].confidence;
                   });
  return order;
}

}  // namespace

std::vector<Detection> nms(const std::vector<Detection>& dets,
                           double iou_thresh) {
  const auto order = rank_by_confidence(dets);
  std::vector<Detection> kept;
  kept.reserve(dets.size());
  for (const std::size_t idx : order) {
    const Detection& cand = dets[idx];
    bool suppressed = false;
    for (const Detection& k : kept) {
      if (k.label.id == cand.label.id && iou(k.box, cand.box) >= iou_thresh) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(cand);
  }
  return kept;
}

MatchOutcome match_detections(const std::vector<Detection>& dets,
                              const std::vector<GroundTruthBox>& gts,
                              double iou_thresh) {
  const auto order = rank_by_confidence(dets);
  std::vector<bool> gt_taken(gts.size(), false);

  MatchOutcome outcome;
  outcome.num_gt = static_cast<int>(gts.size());
  outcome.ranked.reserve(dets.size());

  for (const std::size_t idx : order) {
    const Detection& det = dets[idx];
    double best_iou = 0.0;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_taken[g] || gts[g].label.id != det.label.id) continue;
      const double overlap = iou(det.box, gts[g].box);
      if (overlap >= iou_thresh && overlap > best_iou) {
        best_iou = overlap;
        best_gt = g;  // strict > keeps the lowest index on IoU ties
      }
    }
    RankedDetection r;
    r.confidence = det.confidence;
    r.class_id = det.label.id;
    r.true_positive = best_gt < gts.size();
    if (r.true_positive) gt_taken[best_gt] = true;
    outcome.ranked.push_back(r);
  }
  return outcome;
}

std::vector<PRPoint> pr_curve(const std::vector<RankedDetection>& ranked,
                              int num_gt) {
  std::vector<PRPoint> curve;
  curve.reserve(ranked.size());
  int tp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (ranked[k].true_positive) ++tp;
    PRPoint p;
    p.precision = static_cast<double>(tp) / static_cast<double>(k + 1);
    p.recall = num_gt > 0 ? static_cast<double>(tp) / num_gt : 0.0;
    p.confidence = ranked[k].confidence;
    curve.push_back(p);
  }
  return curve;
}

double average_precision(const std::vector<PRPoint>& curve) {
  if (curve.empty()) return 0.0;
  // Monotone precision envelope: max precision at equal-or-higher recall.
  std::vector<double> envelope(curve.size());
  double running = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    ap += (curve[i].recall - prev_recall) * envelope[i];
    prev_recall = curve[i].recall;
  }
  return ap;
}

namespace {

struct PooledEntry {
  RankedDetection det;
  std::size_t scene = 0;
  std::size_t rank_in_scene = 0;
};

// Stable merge of per-scene rankings: descending confidence, ties by scene
// order then in-scene rank.
std::vector<RankedDetection> pool_rankings(std::vector<PooledEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const PooledEntry& a, const PooledEntry& b) {
                     return a.det.confidence > b.det.confidence;
                   });
  std::vector<RankedDetection> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.det);
  return out;
}

}  // namespace

std::map<int, MatchOutcome> per_class_outcomes(
    const std::vector<EvalScene>& scenes, double iou_thresh) {
  std::map<int, int> gt_counts;
  for (const auto& scene : scenes) {
    for (const auto& gt : scene.ground_truths) ++gt_counts[gt.label.id];
  }

  std::map<int, std::vector<PooledEntry>> pooled;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const MatchOutcome scene_outcome = match_detections(
        scenes[s].detections, scenes[s].ground_truths, iou_thresh);
    for (std::size_t k = 0; k < scene_outcome.ranked.size(); ++k) {
      const RankedDetection& r = scene_outcome.ranked[k];
      if (!gt_counts.count(r.class_id)) continue;  // class has no truth
      pooled[r.class_id].push_back(PooledEntry{r, s, k});
    }
  }

  std::map<int, MatchOutcome> outcomes;
  for (const auto& [class_id, count] : gt_counts) {
    MatchOutcome o;
    o.num_gt = count;
    auto it = pooled.find(class_id);
    if (it != pooled.end()) o.ranked = pool_rankings(std::move(it->second));
    outcomes.emplace(class_id, std::move(o));
  }
  return outcomes;
}

MatchOutcome pooled_outcome(const std::vector<EvalScene>& scenes,
                            double iou_thresh) {
  std::vector<PooledEntry> entries;
  MatchOutcome out;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    out.num_gt += static_cast<int>(scenes[s].ground_truths.size());
    const MatchOutcome scene_outcome = match_detections(
        scenes[s].detections, scenes[s].ground_truths, iou_thresh);
    for (std::size_t k = 0; k < scene_outcome.ranked.size(); ++k) {
      entries.push_back(PooledEntry{scene_outcome.ranked[k], s, k});
    }
  }
  out.ranked = pool_rankings(std::move(entries));
  return out;
}

std::map<int, double> per_class_ap(const std::vector<EvalScene>& scenes,
                                   double iou_thresh) {
  std::map<int, double> aps;
  for (const auto& [class_id, outcome] : per_class_outcomes(scenes, iou_thresh)) {
    aps.emplace(class_id, average_precision(pr_curve(outcome)));
  }
  return aps;
}

double map_at(const std::vector<EvalScene>& scenes, double iou_thresh) {
  const auto aps = per_class_ap(scenes, iou_thresh);
  if (aps.empty()) throw Error("empty ground truth");
  double sum = 0.0;
  for (const auto& [class_id, ap] : aps) sum += ap;
  return sum / static_cast<double>(aps.size());
}

std::array<double, 10> map_iou_thresholds() {
  std::array<double, 10> thresholds{};
  for (int i = 0; i < 10; ++i) {
    thresholds[static_cast<std::size_t>(i)] = (50 + 5 * i) / 100.0;
  }
  return thresholds;
}

double map_range(const std::vector<EvalScene>& scenes) {
  double sum = 0.0;
  for (const double t : map_iou_thresholds()) sum += map_at(scenes, t);
  return sum / 10.0;
}

std::vector<ConfidencePrecisionPoint> precision_confidence_curve(
    const MatchOutcome& outcome) {
  const auto& ranked = outcome.ranked;
  std::vector<ConfidencePrecisionPoint> curve;
  int tp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (ranked[k].true_positive) ++tp;
    const bool last_of_value = k + 1 == ranked.size() ||
                               ranked[k + 1].confidence != ranked[k].confidence;
    if (last_of_value) {
      curve.push_back(ConfidencePrecisionPoint{
          ranked[k].confidence,
          static_cast<double>(tp) / static_cast<double>(k + 1)});
    }
  }
  return curve;
}

std::map<int, std::vector<ConfidencePrecisionPoint>>
precision_confidence_curve_per_class(const MatchOutcome& outcome) {
  std::map<int, MatchOutcome> by_class;
  for (const auto& r : outcome.ranked) {
    by_class[r.class_id].ranked.push_back(r);  // ranking order is preserved
  }
  std::map<int, std::vector<ConfidencePrecisionPoint>> curves;
  for (const auto& [class_id, o] : by_class) {
    curves.emplace(class_id, precision_confidence_curve(o));
  }
  return curves;
}

namespace {

std::string trim_cell(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim_cell(cell));
  return cells;
}

double parse_fraction_cell(const std::string& cell, const char* field,
                           int line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError(line_no, std::string(field) + " '" + cell + "' is not a number");
  }
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ParseError(line_no, std::string(field) + " out of range: " + cell);
  }
  return v;
}

}  // namespace

std::vector<MetricsReport> ingest_metrics_table(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::vector<MetricsReport> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_cell(line).empty()) continue;
    const auto cells = split_csv_row(line);
    if (!header_seen) {
      const std::vector<std::string> expected = {"epoch", "precision", "recall",
                                                 "map50", "map50_95"};
      if (cells != expected) {
        throw ParseError(line_no,
                         "expected header 'epoch,precision,recall,map50,map50_95'");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != 5) {
      throw ParseError(line_no,
                       "expected 5 columns, got " + std::to_string(cells.size()));
    }
    MetricsReport r;
    const auto& epoch_cell = cells[0];
    const auto [ptr, ec] = std::from_chars(
        epoch_cell.data(), epoch_cell.data() + epoch_cell.size(), r.epoch);
    if (ec != std::errc() || ptr != epoch_cell.data() + epoch_cell.size() ||
        r.epoch < 0) {
      throw ParseError(line_no, "epoch '" + epoch_cell + "' is not a non-negative integer");
    }
    r.precision = parse_fraction_cell(cells[1], "precision", line_no);
    r.recall = parse_fraction_cell(cells[2], "recall", line_no);
    r.map50 = parse_fraction_cell(cells[3], "map50", line_no);
    r.map50_95 = parse_fraction_cell(cells[4], "map50_95", line_no);
    rows.push_back(r);
  }
  if (!header_seen) throw ParseError(1, "empty metrics table");
  return rows;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_metrics_table(const std::vector<MetricsReport>& reports) {
  std::ostringstream out;
  const auto pad = [](const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
  };
  out << pad("epoch", 8) << pad("precision", 12) << pad("recall", 12)
      << pad("map50", 12) << "map50_95\n";
  for (const auto& r : reports) {
    out << pad(std::to_string(r.epoch), 8) << pad(format_number(r.precision), 12)
        << pad(format_number(r.recall), 12) << pad(format_number(r.map50), 12)
        << format_number(r.map50_95) << "\n";
  }
  if (!reports.empty()) {
    const auto& last = reports.back();
    out << "final epoch " << last.epoch << ": precision "
        << format_number(last.precision) << " recall "
        << format_number(last.recall) << " map50 " << format_number(last.map50)
        << " map50_95 " << format_number(last.map50_95) << "\n";
  }
  return out.str();
}

}  // namespace canline
