#pragma once

// Test-only reference implementations, independent of the library's
// evaluation path: the matcher enumerates every one-to-one assignment and
// picks the greedy-by-confidence one lexicographically, the AP envelope is
// a direct max scan, and date validity comes from serial-day arithmetic.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <tuple>
#include <vector>

#include "canline/eval.hpp"

namespace oracle {

struct Edge {
  double overlap = 0.0;
  std::size_t gt = 0;
};

// All candidate matches (IoU >= thresh) for each ranked detection.
inline std::vector<std::vector<Edge>> candidate_edges(
    const std::vector<canline::Detection>& ranked_dets,
    const std::vector<canline::BoundingBox>& gts, double thresh) {
  std::vector<std::vector<Edge>> edges(ranked_dets.size());
  for (std::size_t i = 0; i < ranked_dets.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      const double overlap = canline::iou(ranked_dets[i].box, gts[j]);
      if (overlap >= thresh) edges[i].push_back(Edge{overlap, j});
    }
  }
  return edges;
}

// Lexicographic comparison of two complete assignments, one detection at a
// time in rank order: matched beats unmatched, then higher IoU, then lower
// ground-truth index.
inline bool assignment_less(const std::vector<int>& a, const std::vector<int>& b,
                            const std::vector<std::vector<Edge>>& edges) {
  const auto key_at = [&](const std::vector<int>& assign, std::size_t i) {
    if (assign[i] < 0) return std::tuple<int, double, long>(0, 0.0, 0);
    for (const Edge& e : edges[i]) {
      if (static_cast<int>(e.gt) == assign[i]) {
        return std::tuple<int, double, long>(1, e.overlap, -static_cast<long>(e.gt));
      }
    }
    return std::tuple<int, double, long>(0, 0.0, 0);
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ka = key_at(a, i);
    const auto kb = key_at(b, i);
    if (ka != kb) return ka < kb;
  }
  return false;
}

inline void enumerate_assignments(const std::vector<std::vector<Edge>>& edges,
                                  std::size_t i, std::vector<int>& current,
                                  std::vector<bool>& used,
                                  std::vector<int>& best, bool& have_best) {
  if (i == edges.size()) {
    if (!have_best || assignment_less(best, current, edges)) {
      best = current;
      have_best = true;
    }
    return;
  }
  current[i] = -1;
  enumerate_assignments(edges, i + 1, current, used, best, have_best);
  for (const Edge& e : edges[i]) {
    if (used[e.gt]) continue;
    used[e.gt] = true;
    current[i] = static_cast<int>(e.gt);
    enumerate_assignments(edges, i + 1, current, used, best, have_best);
    current[i] = -1;
    used[e.gt] = false;
  }
}

// TP flags for one class of one scene, via exhaustive assignment search.
// Detections are ranked exactly like the implementation ranks them:
// descending confidence, ties by input order.
inline std::vector<canline::RankedDetection> brute_force_match(
    const std::vector<canline::Detection>& dets,
    const std::vector<canline::BoundingBox>& gts, double thresh) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].confidence > dets[b].confidence;
  });
  std::vector<canline::Detection> ranked_dets;
  for (const std::size_t idx : order) ranked_dets.push_back(dets[idx]);

  const auto edges = candidate_edges(ranked_dets, gts, thresh);
  std::vector<int> current(ranked_dets.size(), -1);
  std::vector<int> best;
  std::vector<bool> used(gts.size(), false);
  bool have_best = false;
  enumerate_assignments(edges, 0, current, used, best, have_best);

  std::vector<canline::RankedDetection> flags;
  for (std::size_t i = 0; i < ranked_dets.size(); ++i) {
    canline::RankedDetection r;
    r.confidence = ranked_dets[i].confidence;
    r.class_id = ranked_dets[i].label.id;
    r.true_positive = have_best && best[i] >= 0;
    flags.push_back(r);
  }
  return flags;
}

// Direct max-scan interpolation: for each point, the maximum precision at
// equal-or-higher recall.
inline double brute_force_ap(const std::vector<canline::PRPoint>& curve) {
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    double envelope = 0.0;
    for (const auto& p : curve) {
      if (p.recall >= curve[i].recall) envelope = std::max(envelope, p.precision);
    }
    ap += (curve[i].recall - prev_recall) * envelope;
    prev_recall = curve[i].recall;
  }
  return ap;
}

inline double brute_force_map_at(const std::vector<canline::EvalScene>& scenes,
                                 double thresh) {
  std::map<int, int> gt_counts;
  for (const auto& scene : scenes) {
    for (const auto& gt : scene.ground_truths) ++gt_counts[gt.label.id];
  }

  double sum = 0.0;
  int n_classes = 0;
  for (const auto& [class_id, num_gt] : gt_counts) {
    // Pool per-scene rankings for this class, scene order preserved.
    std::vector<canline::RankedDetection> pooled;
    for (const auto& scene : scenes) {
      std::vector<canline::Detection> class_dets;
      std::vector<canline::BoundingBox> class_gts;
      for (const auto& d : scene.detections) {
        if (d.label.id == class_id) class_dets.push_back(d);
      }
      for (const auto& g : scene.ground_truths) {
        if (g.label.id == class_id) class_gts.push_back(g.box);
      }
      const auto flags = brute_force_match(class_dets, class_gts, thresh);
      pooled.insert(pooled.end(), flags.begin(), flags.end());
    }
    std::stable_sort(pooled.begin(), pooled.end(),
                     [](const canline::RankedDetection& a,
                        const canline::RankedDetection& b) {
                       return a.confidence > b.confidence;
                     });
    sum += brute_force_ap(canline::pr_curve(pooled, num_gt));
    ++n_classes;
  }
  return sum / static_cast<double>(n_classes);
}

// --- serial-day date arithmetic -------------------------------------------

inline long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

inline void civil_from_days(long z, int& y, int& m, int& d) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long yr = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  y = static_cast<int>(yr + (m <= 2));
}

// A (d, m, y) triple names a real day iff it survives the serial round trip.
inline bool valid_date(int day, int month, int year) {
  if (month < 1 || month > 12 || day < 1 || day > 31) return false;
  const long z = days_from_civil(year, month, day);
  int y = 0, m = 0, d = 0;
  civil_from_days(z, y, m, d);
  return y == year && m == month && d == day;
}

}  // namespace oracle
